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

#include <doctest.h>

#include <httplib.h>

#include <cmath>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "itts/corpus/audio.hpp"
#include "itts/error.hpp"
#include "itts/mos/server.hpp"
#include "itts/mos/store.hpp"
#include "test_support.hpp"

using namespace itts;
using namespace itts::mos;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kExternal;
}

// n samples per (system, language), audio written under dir.
CampaignSpec make_spec(const testing::TempDir& dir, const std::string& id,
                       const std::vector<std::string>& systems, const std::vector<std::string>& languages,
                       int per_cell, const std::vector<Rater>& raters) {
  CampaignSpec spec;
  spec.id = id;
  const auto wav = dir / "tone.wav";
  if (!std::filesystem::exists(wav)) corpus::write_wav(wav, testing::sine(220.0, 0.1));
  for (const auto& sys : systems) {
    for (const auto& lang : languages) {
      for (int k = 0; k < per_cell; ++k) {
        spec.samples.push_back({id + "-" + sys + "-" + lang + "-" + std::to_string(k), wav.string(), lang, sys});
      }
    }
  }
  spec.raters = raters;
  return spec;
}

}  // namespace

TEST_CASE("campaign creation and validation") {
  testing::TempDir dir;
  MosStore store(dir / "mos.db");
  auto spec = make_spec(dir, "c1", {"sysA", "sysB", "sysC"}, {"hi"}, 10, {{"r1", "hi"}, {"r2", "hi"}, {"r3", "hi"}});
  CHECK(spec.samples.size() == 30);
  store.create_campaign(spec);
  CHECK(store.expected_ratings("c1") == 90);
  CHECK(store.campaign_ids() == std::vector<std::string>{"c1"});
  CHECK(store.campaign("c1").samples.size() == 30);
  CHECK(code_of([&] { store.create_campaign(spec); }) == ErrorCode::kDuplicate);

  auto other_lang = make_spec(dir, "c2", {"s"}, {"hi"}, 2, {{"r1", "ta"}});
  CHECK(code_of([&] { store.create_campaign(other_lang); }) == ErrorCode::kValidation);
  auto dup_samples = make_spec(dir, "c3", {"s"}, {"hi"}, 2, {{"r1", "hi"}});
  dup_samples.samples[1].sample_id = dup_samples.samples[0].sample_id;
  CHECK(code_of([&] { store.create_campaign(dup_samples); }) == ErrorCode::kDuplicate);
  auto no_samples = make_spec(dir, "c4", {}, {"hi"}, 0, {{"r1", "hi"}});
  CHECK(code_of([&] { store.create_campaign(no_samples); }) == ErrorCode::kValidation);
  auto bad_audio = make_spec(dir, "c5", {"s"}, {"hi"}, 1, {{"r1", "hi"}});
  bad_audio.samples[0].audio_path = (dir / "missing.wav").string();
  CHECK(code_of([&] { store.create_campaign(bad_audio); }) == ErrorCode::kValidation);
  CHECK(store.campaign_ids().size() == 1);
  CHECK(code_of([&] { store.expected_ratings("nope"); }) == ErrorCode::kNotFound);
}

TEST_CASE("per-rater order, statelessness and completion") {
  testing::TempDir dir;
  MosStore store(dir / "mos.db");
  store.create_campaign(make_spec(dir, "c", {"a", "b"}, {"hi", "te"}, 3, {{"r1", "hi"}, {"r2", "hi"}, {"r3", "te"}}));

  const auto first = store.next_sample("c", "r1");
  CHECK_FALSE(first.done);
  REQUIRE(first.sample.has_value());
  CHECK(store.next_sample("c", "r1").sample->sample_id == first.sample->sample_id);
  CHECK(first.progress.rated == 0);
  CHECK(first.progress.total == 6);

  std::vector<std::string> seen;
  for (int k = 0; k < 6; ++k) {
    const auto next = store.next_sample("c", "r1");
    REQUIRE(next.sample.has_value());
    CHECK(next.sample->language == "hi");
    seen.push_back(next.sample->sample_id);
    store.submit_rating("c", "r1", next.sample->sample_id, 1 + k % 5);
    CHECK(store.progress("c", "r1").rated == k + 1);
  }
  CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == 6);
  const auto done = store.next_sample("c", "r1");
  CHECK(done.done);
  CHECK_FALSE(done.sample.has_value());
  CHECK(code_of([&] { store.next_sample("c", "ghost"); }) == ErrorCode::kNotFound);

  const auto o1 = rater_order("c", "r1", 20);
  CHECK(o1 == rater_order("c", "r1", 20));
  CHECK(o1 != rater_order("c", "r2", 20));
  CHECK(std::set<size_t>(o1.begin(), o1.end()).size() == 20);
}

TEST_CASE("rating submission rules") {
  testing::TempDir dir;
  MosStore store(dir / "mos.db");
  store.create_campaign(make_spec(dir, "c", {"a"}, {"hi", "te"}, 2, {{"r1", "hi"}}));
  store.set_clock([] { return std::string("2026-01-01T00:00:00Z"); });
  CHECK(code_of([&] { store.submit_rating("c", "r1", "c-a-hi-0", 6); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { store.submit_rating("c", "r1", "c-a-hi-0", 0); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { store.submit_rating("c", "r1", "c-a-te-0", 3); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { store.submit_rating("c", "r1", "nope", 3); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { store.submit_rating("c", "r9", "c-a-hi-0", 3); }) == ErrorCode::kNotFound);
  const auto rec = store.submit_rating("c", "r1", "c-a-hi-0", 4);
  CHECK(rec.timestamp == "2026-01-01T00:00:00Z");
  CHECK(code_of([&] { store.submit_rating("c", "r1", "c-a-hi-0", 2); }) == ErrorCode::kDuplicate);
  const auto all = store.ratings("c");
  REQUIRE(all.size() == 1);
  CHECK(all[0].score == 4);

  std::ostringstream csv;
  store.export_csv("c", csv);
  CHECK(csv.str() == "rater_id,sample_id,score,timestamp\nr1,c-a-hi-0,4,2026-01-01T00:00:00Z\n");
}

TEST_CASE("report arithmetic") {
  testing::TempDir dir;
  MosStore store(dir / "mos.db");
  store.create_campaign(make_spec(dir, "c", {"sysA", "sysB", "sysC"}, {"hi"}, 1,
                                  {{"r1", "hi"}, {"r2", "hi"}, {"r3", "hi"}}));
  const std::map<std::string, std::vector<int>> scores{{"c-sysA-hi-0", {3, 4, 5}}, {"c-sysB-hi-0", {4, 4, 4}}};
  for (const auto& [sample, vals] : scores) {
    for (size_t r = 0; r < vals.size(); ++r) store.submit_rating("c", "r" + std::to_string(r + 1), sample, vals[r]);
  }
  const auto report = store.report("c");
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].system == "sysA");
  CHECK(report.rows[0].mean == 4.0);
  CHECK(report.rows[0].count == 3);
  CHECK(report.rows[0].ci95 == doctest::Approx(1.96 * 1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(report.rows[1].mean == 4.0);
  CHECK(report.rows[1].ci95 == 0.0);
  CHECK(report.expected_ratings == 9);
  CHECK(report.received_ratings == 6);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("sysC") != std::string::npos);
}

TEST_CASE("report means equal the arithmetic mean of persisted ratings") {
  testing::TempDir dir;
  MosStore store(dir / "mos.db");
  std::vector<Rater> raters;
  for (int r = 0; r < 7; ++r) raters.push_back({"r" + std::to_string(r), "hi"});
  store.create_campaign(make_spec(dir, "c", {"x", "y"}, {"hi"}, 5, raters));
  std::mt19937 rng(3);
  for (const auto& rater : raters) {
    while (true) {
      const auto next = store.next_sample("c", rater.rater_id);
      if (next.done) break;
      store.submit_rating("c", rater.rater_id, next.sample->sample_id, 1 + static_cast<int>(rng() % 5));
    }
  }
  std::map<std::string, std::pair<int64_t, int64_t>> sums;
  for (const auto& rec : store.ratings("c")) {
    auto& s = sums[store.sample(rec.sample_id)->system];
    s.first += rec.score;
    s.second += 1;
  }
  for (const auto& row : store.report("c").rows) {
    const auto [sum, n] = sums.at(row.system);
    CHECK(row.count == n);
    CHECK(row.mean == static_cast<double>(sum) / static_cast<double>(n));
    CHECK(row.mean >= 1.0);
    CHECK(row.mean <= 5.0);
  }
}

TEST_CASE("HTTP API") {
  testing::TempDir dir;
  MosStore store(dir / "mos.db");
  auto spec = make_spec(dir, "camp", {"secret-system-a", "secret-system-b"}, {"hi"}, 2, {{"r1", "hi"}, {"r2", "hi"}});
  for (size_t k = 0; k < spec.samples.size(); ++k) spec.samples[k].sample_id = "s" + std::to_string(k);
  store.create_campaign(spec);
  MosServer server(store);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);

  auto next = cli.Get("/campaigns/camp/next?rater=r1");
  REQUIRE(next);
  CHECK(next->status == 200);
  CHECK(next->body.find("secret-system") == std::string::npos);
  auto payload = json::parse(next->body);
  CHECK(payload["done"] == false);
  CHECK(payload["progress"]["total"] == 4);
  CHECK(payload["scale"]["labels"] == json({"Bad", "Poor", "Fair", "Good", "Excellent"}));
  const auto sample_id = payload["sample"]["sample_id"].get<std::string>();

  auto audio = cli.Get(payload["sample"]["audio_url"].get<std::string>());
  REQUIRE(audio);
  CHECK(audio->status == 200);
  CHECK(audio->get_header_value("Content-Type") == "audio/wav");
  CHECK(corpus::decode_wav(audio->body).samples.size() == 2205);

  auto post = [&](const json& body) { return cli.Post("/campaigns/camp/ratings", body.dump(), "application/json"); };
  auto ok = post({{"rater", "r1"}, {"sample", sample_id}, {"score", 5}});
  REQUIRE(ok);
  CHECK(ok->status == 201);
  CHECK(json::parse(ok->body)["progress"]["rated"] == 1);
  CHECK(ok->body.find("secret-system") == std::string::npos);

  auto dup = post({{"rater", "r1"}, {"sample", sample_id}, {"score", 1}});
  CHECK(dup->status == 409);
  CHECK(json::parse(dup->body)["error"]["code"] == "duplicate");
  CHECK(post({{"rater", "r1"}, {"sample", sample_id}, {"score", 6}})->status == 400);
  CHECK(post({{"rater", "r1"}, {"sample", sample_id}, {"score", 2.5}})->status == 400);
  CHECK(post({{"rater", "r1"}})->status == 400);
  CHECK(cli.Post("/campaigns/camp/ratings", "{not json", "application/json")->status == 400);
  CHECK(post({{"rater", "ghost"}, {"sample", sample_id}, {"score", 3}})->status == 404);
  CHECK(cli.Get("/campaigns/camp/next")->status == 400);
  CHECK(cli.Get("/campaigns/none/next?rater=r1")->status == 404);
  CHECK(cli.Get("/samples/none/audio")->status == 404);
  CHECK(cli.Get("/nowhere")->status == 404);

  // Concurrent raters.
  std::vector<std::thread> raters;
  for (const std::string r : {"r1", "r2"}) {
    raters.emplace_back([&, r] {
      httplib::Client c("127.0.0.1", port);
      while (true) {
        auto n = json::parse(c.Get("/campaigns/camp/next?rater=" + r)->body);
        if (n["done"].get<bool>()) break;
        c.Post("/campaigns/camp/ratings",
               json{{"rater", r}, {"sample", n["sample"]["sample_id"]}, {"score", 4}}.dump(), "application/json");
      }
    });
  }
  for (auto& th : raters) th.join();

  auto report = cli.Get("/campaigns/camp/report");
  REQUIRE(report);
  CHECK(report->status == 200);
  const auto rj = json::parse(report->body);
  CHECK(rj["received_ratings"] == 8);
  CHECK(rj["expected_ratings"] == 8);
  CHECK(rj["rows"].size() == 2);

  server.stop();
  t.join();
}

TEST_CASE("HTTP status mapping and campaign files") {
  CHECK(http_status(ErrorCode::kValidation) == 400);
  CHECK(http_status(ErrorCode::kOutOfRange) == 400);
  CHECK(http_status(ErrorCode::kNotFound) == 404);
  CHECK(http_status(ErrorCode::kDuplicate) == 409);
  CHECK(http_status(ErrorCode::kIo) == 500);

  const auto j = json::parse(R"({"id": "c", "samples": [{"sample_id": "s1", "audio": "a.wav",
      "language": "hi", "system": "x"}], "raters": [{"rater_id": "r", "language": "hi"}]})");
  const auto spec = read_campaign_spec(j, "/base");
  CHECK(spec.samples[0].audio_path == "/base/a.wav");
  CHECK(spec.raters[0].rater_id == "r");
  CHECK(code_of([] { read_campaign_spec(json::parse(R"({"id": "c"})")); }) == ErrorCode::kFormat);
}
