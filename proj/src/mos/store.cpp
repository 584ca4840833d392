// Copyright (c) 2026 The itts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "itts/mos/store.hpp"

#include <sqlite3.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "itts/corpus/audio.hpp"
#include "itts/error.hpp"

namespace itts::mos {

namespace {

// Prepared statement with RAII finalize and 1-based text/int binding.
class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::kIo, std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& bind(int i, int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }
  // True while rows remain.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::kIo, std::string("sqlite step: ") + sqlite3_errmsg(db_));
  }
  int step_rc() { return sqlite3_step(stmt_); }
  std::string text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? reinterpret_cast<const char*>(p) : "";
  }
  int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof(out), "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

uint64_t fnv1a(const std::string& a, const std::string& b) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(a);
  h ^= 0xff;  // separator so ("ab","c") and ("a","bc") differ
  h *= 0x100000001b3ULL;
  feed(b);
  return h;
}

}  // namespace

const std::vector<std::string>& score_labels() {
  static const std::vector<std::string> labels{"Bad", "Poor", "Fair", "Good", "Excellent"};
  return labels;
}

std::vector<size_t> rater_order(const std::string& campaign_id, const std::string& rater_id, size_t n) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(fnv1a(campaign_id, rater_id));
  for (size_t i = n; i > 1; --i) {
    // Rejection sampling keeps the draw unbiased and library-independent.
    const uint64_t bound = i;
    const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % bound;
    uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(order[i - 1], order[static_cast<size_t>(r % bound)]);
  }
  return order;
}

nlohmann::json next_payload(const std::string& campaign_id, const NextSample& next) {
  nlohmann::json j{{"campaign", campaign_id},
                   {"done", next.done},
                   {"progress", {{"rated", next.progress.rated}, {"total", next.progress.total}}},
                   {"scale", {{"min", kMinScore}, {"max", kMaxScore}, {"labels", score_labels()}}}};
  if (next.sample) {
    j["sample"] = {{"sample_id", next.sample->sample_id},
                   {"language", next.sample->language},
                   {"audio_url", "/samples/" + next.sample->sample_id + "/audio"}};
  } else {
    j["sample"] = nullptr;
  }
  return j;
}

nlohmann::json MosReport::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"system", r.system}, {"language", r.language}, {"mean", r.mean},
                      {"count", r.count}, {"ci95", r.ci95}});
  }
  return {{"campaign", campaign_id},
          {"rows", rows_j},
          {"warnings", warnings},
          {"expected_ratings", expected_ratings},
          {"received_ratings", received_ratings}};
}

MosStore::MosStore(const std::filesystem::path& path) : clock_(utc_now) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::kIo, "cannot open MOS store " + path.string() + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  exec("PRAGMA journal_mode=WAL");
  exec("PRAGMA foreign_keys=ON");
  exec(R"(CREATE TABLE IF NOT EXISTS campaigns(
            id TEXT PRIMARY KEY,
            created TEXT NOT NULL))");
  exec(R"(CREATE TABLE IF NOT EXISTS samples(
            sample_id TEXT PRIMARY KEY,
            campaign_id TEXT NOT NULL REFERENCES campaigns(id),
            position INTEGER NOT NULL,
            audio_path TEXT NOT NULL,
            language TEXT NOT NULL,
            system TEXT NOT NULL))");
  exec(R"(CREATE TABLE IF NOT EXISTS raters(
            campaign_id TEXT NOT NULL REFERENCES campaigns(id),
            rater_id TEXT NOT NULL,
            language TEXT NOT NULL,
            PRIMARY KEY(campaign_id, rater_id)))");
  exec(R"(CREATE TABLE IF NOT EXISTS ratings(
            seq INTEGER PRIMARY KEY AUTOINCREMENT,
            campaign_id TEXT NOT NULL,
            rater_id TEXT NOT NULL,
            sample_id TEXT NOT NULL REFERENCES samples(sample_id),
            score INTEGER NOT NULL CHECK(score BETWEEN 1 AND 5),
            timestamp TEXT NOT NULL,
            UNIQUE(campaign_id, rater_id, sample_id),
            FOREIGN KEY(campaign_id, rater_id) REFERENCES raters(campaign_id, rater_id)))");
}

MosStore::~MosStore() { sqlite3_close(db_); }

void MosStore::exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw Error(ErrorCode::kIo, "sqlite: " + msg);
  }
}

void MosStore::create_campaign(const CampaignSpec& spec) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  if (spec.id.empty()) throw Error(ErrorCode::kValidation, "campaign id is empty");
  if (spec.samples.empty()) throw Error(ErrorCode::kValidation, "campaign has no samples");
  if (spec.raters.empty()) throw Error(ErrorCode::kValidation, "campaign has no raters");

  std::set<std::string> ids, languages, rater_ids;
  for (const auto& s : spec.samples) {
    if (s.sample_id.empty()) throw Error(ErrorCode::kValidation, "sample id is empty");
    if (!ids.insert(s.sample_id).second) throw Error(ErrorCode::kDuplicate, "duplicate sample id '" + s.sample_id + "'");
    languages.insert(s.language);
    try {
      if (corpus::read_wav(s.audio_path).empty()) throw Error(ErrorCode::kFormat, "no samples");
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, "sample '" + s.sample_id + "' audio is not playable: " + e.what());
    }
  }
  for (const auto& r : spec.raters) {
    if (!rater_ids.insert(r.rater_id).second) throw Error(ErrorCode::kDuplicate, "duplicate rater id '" + r.rater_id + "'");
    if (!languages.count(r.language)) {
      throw Error(ErrorCode::kValidation, "rater '" + r.rater_id + "' speaks '" + r.language +
                                              "' but no sample is in that language");
    }
  }

  exec("BEGIN IMMEDIATE");
  try {
    {
      Statement q(db_, "SELECT 1 FROM campaigns WHERE id = ?");
      if (q.bind(1, spec.id).step()) throw Error(ErrorCode::kDuplicate, "campaign '" + spec.id + "' exists");
    }
    Statement c(db_, "INSERT INTO campaigns(id, created) VALUES(?, ?)");
    c.bind(1, spec.id).bind(2, clock_()).step();
    for (size_t i = 0; i < spec.samples.size(); ++i) {
      const auto& s = spec.samples[i];
      Statement q(db_, "SELECT campaign_id FROM samples WHERE sample_id = ?");
      if (q.bind(1, s.sample_id).step()) {
        throw Error(ErrorCode::kDuplicate, "sample id '" + s.sample_id + "' already used by campaign '" + q.text(0) + "'");
      }
      Statement ins(db_, "INSERT INTO samples(sample_id, campaign_id, position, audio_path, language, system) "
                         "VALUES(?, ?, ?, ?, ?, ?)");
      ins.bind(1, s.sample_id).bind(2, spec.id).bind(3, static_cast<int64_t>(i)).bind(4, s.audio_path)
          .bind(5, s.language).bind(6, s.system).step();
    }
    for (const auto& r : spec.raters) {
      Statement ins(db_, "INSERT INTO raters(campaign_id, rater_id, language) VALUES(?, ?, ?)");
      ins.bind(1, spec.id).bind(2, r.rater_id).bind(3, r.language).step();
    }
    exec("COMMIT");
  } catch (...) {
    exec("ROLLBACK");
    throw;
  }
}

void MosStore::require_campaign(const std::string& campaign_id) {
  Statement q(db_, "SELECT 1 FROM campaigns WHERE id = ?");
  if (!q.bind(1, campaign_id).step()) throw Error(ErrorCode::kNotFound, "unknown campaign '" + campaign_id + "'");
}

std::optional<Rater> MosStore::find_rater(const std::string& campaign_id, const std::string& rater_id) {
  Statement q(db_, "SELECT language FROM raters WHERE campaign_id = ? AND rater_id = ?");
  if (!q.bind(1, campaign_id).bind(2, rater_id).step()) return std::nullopt;
  return Rater{rater_id, q.text(0)};
}

std::vector<Sample> MosStore::samples_for(const std::string& campaign_id, const std::string& language) {
  Statement q(db_, "SELECT sample_id, audio_path, language, system FROM samples "
                   "WHERE campaign_id = ? AND language = ? ORDER BY position");
  q.bind(1, campaign_id).bind(2, language);
  std::vector<Sample> out;
  while (q.step()) out.push_back({q.text(0), q.text(1), q.text(2), q.text(3)});
  return out;
}

CampaignSpec MosStore::campaign(const std::string& campaign_id) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  require_campaign(campaign_id);
  CampaignSpec spec;
  spec.id = campaign_id;
  Statement s(db_, "SELECT sample_id, audio_path, language, system FROM samples WHERE campaign_id = ? ORDER BY position");
  s.bind(1, campaign_id);
  while (s.step()) spec.samples.push_back({s.text(0), s.text(1), s.text(2), s.text(3)});
  Statement r(db_, "SELECT rater_id, language FROM raters WHERE campaign_id = ? ORDER BY rater_id");
  r.bind(1, campaign_id);
  while (r.step()) spec.raters.push_back({r.text(0), r.text(1)});
  return spec;
}

std::vector<std::string> MosStore::campaign_ids() {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  Statement q(db_, "SELECT id FROM campaigns ORDER BY id");
  std::vector<std::string> out;
  while (q.step()) out.push_back(q.text(0));
  return out;
}

int64_t MosStore::expected_ratings(const std::string& campaign_id) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  require_campaign(campaign_id);
  Statement q(db_, "SELECT COUNT(*) FROM raters r JOIN samples s "
                   "ON s.campaign_id = r.campaign_id AND s.language = r.language WHERE r.campaign_id = ?");
  q.bind(1, campaign_id).step();
  return q.integer(0);
}

Progress MosStore::progress(const std::string& campaign_id, const std::string& rater_id) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  require_campaign(campaign_id);
  auto rater = find_rater(campaign_id, rater_id);
  if (!rater) throw Error(ErrorCode::kNotFound, "unknown rater '" + rater_id + "'");
  Progress p;
  p.total = static_cast<int64_t>(samples_for(campaign_id, rater->language).size());
  Statement q(db_, "SELECT COUNT(*) FROM ratings WHERE campaign_id = ? AND rater_id = ?");
  q.bind(1, campaign_id).bind(2, rater_id).step();
  p.rated = q.integer(0);
  return p;
}

NextSample MosStore::next_sample(const std::string& campaign_id, const std::string& rater_id) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  require_campaign(campaign_id);
  auto rater = find_rater(campaign_id, rater_id);
  if (!rater) throw Error(ErrorCode::kNotFound, "unknown rater '" + rater_id + "'");
  const auto samples = samples_for(campaign_id, rater->language);
  std::set<std::string> rated;
  Statement q(db_, "SELECT sample_id FROM ratings WHERE campaign_id = ? AND rater_id = ?");
  q.bind(1, campaign_id).bind(2, rater_id);
  while (q.step()) rated.insert(q.text(0));

  NextSample next;
  next.progress = {static_cast<int64_t>(rated.size()), static_cast<int64_t>(samples.size())};
  for (size_t idx : rater_order(campaign_id, rater_id, samples.size())) {
    if (!rated.count(samples[idx].sample_id)) {
      next.sample = samples[idx];
      return next;
    }
  }
  next.done = true;
  return next;
}

RatingRecord MosStore::submit_rating(const std::string& campaign_id, const std::string& rater_id,
                                     const std::string& sample_id, int score) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  if (score < kMinScore || score > kMaxScore) {
    throw Error(ErrorCode::kValidation, "score must be an integer from 1 to 5, got " + std::to_string(score));
  }
  require_campaign(campaign_id);
  auto rater = find_rater(campaign_id, rater_id);
  if (!rater) throw Error(ErrorCode::kNotFound, "unknown rater '" + rater_id + "'");
  std::string language;
  {
    Statement q(db_, "SELECT language FROM samples WHERE campaign_id = ? AND sample_id = ?");
    if (!q.bind(1, campaign_id).bind(2, sample_id).step()) {
      throw Error(ErrorCode::kNotFound, "unknown sample '" + sample_id + "' in campaign '" + campaign_id + "'");
    }
    language = q.text(0);
  }
  if (language != rater->language) {
    throw Error(ErrorCode::kValidation, "sample '" + sample_id + "' is not assigned to rater '" + rater_id + "'");
  }
  RatingRecord rec{rater_id, sample_id, score, clock_()};
  Statement ins(db_, "INSERT INTO ratings(campaign_id, rater_id, sample_id, score, timestamp) VALUES(?, ?, ?, ?, ?)");
  ins.bind(1, campaign_id).bind(2, rater_id).bind(3, sample_id).bind(4, static_cast<int64_t>(score)).bind(5, rec.timestamp);
  const int rc = ins.step_rc();
  if (rc == SQLITE_CONSTRAINT) {
    throw Error(ErrorCode::kDuplicate, "rater '" + rater_id + "' already rated sample '" + sample_id + "'");
  }
  if (rc != SQLITE_DONE) throw Error(ErrorCode::kIo, std::string("sqlite insert: ") + sqlite3_errmsg(db_));
  return rec;
}

std::vector<RatingRecord> MosStore::ratings(const std::string& campaign_id) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  require_campaign(campaign_id);
  Statement q(db_, "SELECT rater_id, sample_id, score, timestamp FROM ratings WHERE campaign_id = ? ORDER BY seq");
  q.bind(1, campaign_id);
  std::vector<RatingRecord> out;
  while (q.step()) out.push_back({q.text(0), q.text(1), static_cast<int>(q.integer(2)), q.text(3)});
  return out;
}

MosReport MosStore::report(const std::string& campaign_id) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  const auto spec = campaign(campaign_id);
  std::map<std::string, const Sample*> by_id;
  std::map<std::pair<std::string, std::string>, std::vector<int>> groups;
  for (const auto& s : spec.samples) {
    by_id[s.sample_id] = &s;
    groups[{s.system, s.language}];
  }
  MosReport report;
  report.campaign_id = campaign_id;
  report.expected_ratings = expected_ratings(campaign_id);
  for (const auto& r : ratings(campaign_id)) {
    const auto* s = by_id.at(r.sample_id);
    groups[{s->system, s->language}].push_back(r.score);
    ++report.received_ratings;
  }
  for (const auto& [key, scores] : groups) {
    if (scores.empty()) {
      report.warnings.push_back("no ratings for system '" + key.first + "' in language '" + key.second + "'");
      continue;
    }
    const auto n = static_cast<int64_t>(scores.size());
    int64_t sum = 0;
    for (int v : scores) sum += v;
    MosRow row{key.first, key.second, static_cast<double>(sum) / static_cast<double>(n), n, 0.0};
    if (n > 1) {
      double ss = 0.0;
      for (int v : scores) ss += (v - row.mean) * (v - row.mean);
      row.ci95 = 1.96 * std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
    report.rows.push_back(row);
  }
  return report;
}

void MosStore::export_csv(const std::string& campaign_id, std::ostream& out) {
  out << "rater_id,sample_id,score,timestamp\n";
  for (const auto& r : ratings(campaign_id)) {
    out << r.rater_id << ',' << r.sample_id << ',' << r.score << ',' << r.timestamp << '\n';
  }
}

std::optional<Sample> MosStore::sample(const std::string& sample_id) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  Statement q(db_, "SELECT sample_id, audio_path, language, system FROM samples WHERE sample_id = ?");
  if (!q.bind(1, sample_id).step()) return std::nullopt;
  return Sample{q.text(0), q.text(1), q.text(2), q.text(3)};
}

CampaignSpec read_campaign_spec(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  CampaignSpec spec;
  try {
    spec.id = j.at("id").get<std::string>();
    for (const auto& s : j.at("samples")) {
      std::filesystem::path audio = s.at("audio").get<std::string>();
      if (audio.is_relative() && !base_dir.empty()) audio = base_dir / audio;
      spec.samples.push_back({s.at("sample_id").get<std::string>(), audio.string(),
                              s.at("language").get<std::string>(), s.at("system").get<std::string>()});
    }
    for (const auto& r : j.at("raters")) {
      spec.raters.push_back({r.at("rater_id").get<std::string>(), r.at("language").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed campaign definition: ") + e.what());
  }
  return spec;
}

}  // namespace itts::mos
