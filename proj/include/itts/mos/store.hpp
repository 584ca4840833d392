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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

struct sqlite3;

namespace itts::mos {

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;

// Rating scale labels, index = score - 1.
const std::vector<std::string>& score_labels();

struct Sample {
  std::string sample_id;  // unique across all campaigns
  std::string audio_path;
  std::string language;
  std::string system;  // never shown to raters
};

struct Rater {
  std::string rater_id;
  std::string language;
};

struct CampaignSpec {
  std::string id;
  std::vector<Sample> samples;
  std::vector<Rater> raters;
};

struct RatingRecord {
  std::string rater_id;
  std::string sample_id;
  int score = 0;
  std::string timestamp;  // UTC, ISO 8601
};

struct Progress {
  int64_t rated = 0;
  int64_t total = 0;
};

struct NextSample {
  bool done = false;
  std::optional<Sample> sample;
  Progress progress;
};

struct MosRow {
  std::string system;
  std::string language;
  double mean = 0.0;
  int64_t count = 0;
  // Half-width of the normal-approximation 95% interval, 1.96 s / sqrt(n)
  // with the sample standard deviation s; 0 for a single rating.
  double ci95 = 0.0;
};

struct MosReport {
  std::string campaign_id;
  std::vector<MosRow> rows;  // sorted by (system, language)
  std::vector<std::string> warnings;
  int64_t expected_ratings = 0;
  int64_t received_ratings = 0;

  nlohmann::json to_json() const;
};

// Position of each sample in a rater's presentation order: a Fisher-Yates
// shuffle of [0, n) seeded by FNV-1a of (campaign id, rater id).
std::vector<size_t> rater_order(const std::string& campaign_id, const std::string& rater_id, size_t n);

// Rater-facing JSON for next_sample; contains no system label.
nlohmann::json next_payload(const std::string& campaign_id, const NextSample& next);

// Listening-test store in a single SQLite file (WAL journal). All methods
// are serialized by an internal mutex; each submission is one transaction.
class MosStore {
 public:
  explicit MosStore(const std::filesystem::path& path);
  ~MosStore();
  MosStore(const MosStore&) = delete;
  MosStore& operator=(const MosStore&) = delete;

  // Validates and persists a campaign. Errors: Error{kValidation} for no
  // samples, unreadable audio or a rater whose language has no sample;
  // Error{kDuplicate} for repeated campaign, sample or rater ids.
  void create_campaign(const CampaignSpec& spec);
  CampaignSpec campaign(const std::string& campaign_id);
  std::vector<std::string> campaign_ids();
  // Sum over raters of the samples in their language.
  int64_t expected_ratings(const std::string& campaign_id);

  // Throws Error{kNotFound} for unknown campaign or rater.
  NextSample next_sample(const std::string& campaign_id, const std::string& rater_id);
  Progress progress(const std::string& campaign_id, const std::string& rater_id);

  // Errors: Error{kValidation} for a score outside 1..5 or a sample in
  // another language than the rater's; Error{kNotFound} for unknown ids;
  // Error{kDuplicate} when the pair was already rated (first value kept).
  RatingRecord submit_rating(const std::string& campaign_id, const std::string& rater_id,
                             const std::string& sample_id, int score);

  std::vector<RatingRecord> ratings(const std::string& campaign_id);
  MosReport report(const std::string& campaign_id);
  // Header rater_id,sample_id,score,timestamp; rows in submission order.
  void export_csv(const std::string& campaign_id, std::ostream& out);

  std::optional<Sample> sample(const std::string& sample_id);

  // Timestamp source for new ratings (UTC now by default).
  void set_clock(std::function<std::string()> clock) { clock_ = std::move(clock); }

 private:
  void exec(const char* sql);
  void require_campaign(const std::string& campaign_id);
  std::optional<Rater> find_rater(const std::string& campaign_id, const std::string& rater_id);
  std::vector<Sample> samples_for(const std::string& campaign_id, const std::string& language);

  sqlite3* db_ = nullptr;
  std::recursive_mutex mutex_;
  std::function<std::string()> clock_;
};

// Reads a campaign definition:
//   {"id": ..., "samples": [{"sample_id", "audio", "language", "system"}],
//    "raters": [{"rater_id", "language"}]}
// Relative audio paths are resolved against base_dir.
CampaignSpec read_campaign_spec(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

}  // namespace itts::mos
