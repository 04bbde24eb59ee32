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

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "odmap/error.hpp"
#include "odmap/synth.hpp"
#include "odmap/tensor.hpp"
#include "support.hpp"

using namespace odmap;

namespace {

std::vector<SearchRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  std::vector<SearchRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_record(line));
  }
  return out;
}

void check_against_oracle(const OdTensor& t, const std::map<oracle::CellKey, std::uint64_t>& expect) {
  std::uint64_t nnz = 0;
  for (std::uint32_t d = 0; d < t.n_days(); ++d) {
    for (const auto& c : t.day(d)) {
      auto it = expect.find({c.origin, c.destination, d});
      REQUIRE(it != expect.end());
      CHECK(it->second == c.count);
      ++nnz;
    }
  }
  CHECK(nnz == expect.size());
}

struct SmallCorpus {
  IcRegistry registry;
  std::vector<SearchRecord> records;
};

SmallCorpus small_corpus(std::uint64_t seed, std::uint32_t n_ics = 30, double rate = 0.01) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.years = {2023, 2024};
  cfg.n_ics = n_ics;
  cfg.base_rate = rate;
  cfg.specified_fraction = 0.4;
  cfg.lookahead_days = 20;
  SmallCorpus c{make_registry(n_ics, seed), {}};
  generate(cfg, c.registry, [&](const SearchRecord& r) { c.records.push_back(r); });
  return c;
}

}  // namespace

TEST_CASE("empty stream gives the zero tensor") {
  const auto reg = load_registry_csv(testing::data_file("hand_registry.csv"));
  IngestStats stats;
  const auto t = build_od_tensor({}, reg, 2023, TimeCategory::Specified, UnknownIcPolicy::Error, &stats);
  CHECK(t.n_days() == 365);
  CHECK(t.n_ics() == 3);
  CHECK(t.total() == 0);
  CHECK(t.nnz() == 0);
  CHECK(stats.read == 0);
  CHECK(t == OdTensor(2023, TimeCategory::Specified, 3));
}

TEST_CASE("hand corpus matches a brute-force hash-map count") {
  const auto reg = load_registry_csv(testing::data_file("hand_registry.csv"));
  const auto records = read_records(testing::data_file("hand_corpus.csv"));
  REQUIRE(records.size() == 5);
  std::ifstream in(testing::data_file("hand_corpus.csv"));
  const auto expect = oracle::count_log(in, oracle::registry_index(testing::data_file("hand_registry.csv")), 2023);

  IngestStats s_stats, u_stats;
  const auto spec = build_od_tensor(records, reg, 2023, TimeCategory::Specified, UnknownIcPolicy::Error, &s_stats);
  const auto unspec = build_od_tensor(records, reg, 2023, TimeCategory::Unspecified, UnknownIcPolicy::Error, &u_stats);
  CHECK(spec.total() == 2);
  CHECK(unspec.total() == 3);
  check_against_oracle(spec, expect.specified);
  check_against_oracle(unspec, expect.unspecified);
  // IC001 -> IC002 on 2023-04-29 (day 118); indices IC003=0, IC002=1, IC001=2.
  CHECK(spec.at(2, 1, 118) == 1);
  CHECK(spec.at(0, 0, 364) == 1);
  CHECK(s_stats.accepted == 2);
  CHECK(s_stats.other_category == 3);
  CHECK(s_stats.reconciles());
  CHECK(u_stats.accepted == 3);
  CHECK(u_stats.reconciles());
}

TEST_CASE("leap year: 2024-12-31 lands on day 365") {
  const auto reg = IcRegistry::build({{"A", "", 1, 1}, {"B", "", 2, 2}});
  const std::vector<SearchRecord> recs = {parse_record("2024-12-31T12:00,A,B,"),
                                          parse_record("2024-02-29T12:00,B,A,")};
  const auto t = build_od_tensor(recs, reg, 2024, TimeCategory::Unspecified);
  CHECK(t.n_days() == 366);
  CHECK(t.at(0, 1, 365) == 1);
  CHECK(t.at(1, 0, 59) == 1);
}

TEST_CASE("out-of-year and unknown IC accounting") {
  const auto reg = IcRegistry::build({{"A", "", 1, 1}, {"B", "", 2, 2}});
  const std::vector<SearchRecord> recs = {
      parse_record("2023-03-01T12:00,A,B,"), parse_record("2022-12-31T23:59,A,B,"),
      parse_record("2023-03-01T12:00,A,GHOST,"), parse_record("2023-03-01T12:00,GHOST,B,"),
      parse_record("2022-12-31T23:00,A,B,2023-01-01T00:00")};
  IngestStats stats;
  const auto t = build_od_tensor(recs, reg, 2023, TimeCategory::Unspecified, UnknownIcPolicy::Skip, &stats);
  CHECK(t.total() == 1);
  CHECK(stats.read == 5);
  CHECK(stats.accepted == 1);
  CHECK(stats.out_of_year == 1);
  CHECK(stats.unknown_ic == 2);
  CHECK(stats.other_category == 1);
  CHECK(stats.reconciles());

  try {
    build_od_tensor(recs, reg, 2023, TimeCategory::Unspecified, UnknownIcPolicy::Error);
    FAIL("expected unknown IC error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownIc);
    CHECK(std::string(e.what()).find("2 record") != std::string::npos);
    CHECK(std::string(e.what()).find("GHOST") != std::string::npos);
  }

  // Specified record from 2022 pointing into 2023 counts in 2023.
  const auto s = build_od_tensor(recs, reg, 2023, TimeCategory::Specified, UnknownIcPolicy::Skip);
  CHECK(s.at(0, 1, 0) == 1);
}

TEST_CASE("generated corpus matches the brute-force counter cell for cell") {
  const std::uint64_t seed = 99;
  testing::TempDir dir("tensor_oracle");
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.years = {2023};
  cfg.n_ics = 40;
  cfg.base_rate = 0.02;
  cfg.popularity_exponent = 1.2;
  const auto files = write_corpus(cfg, dir.path().string());
  const auto reg = load_registry_csv(files.registry);
  std::ifstream in(files.logs);
  const auto expect = oracle::count_log(in, oracle::registry_index(files.registry), 2023);

  IngestOptions opts;
  opts.year = 2023;
  const auto built = ingest_log_file(files.logs, reg, opts);
  check_against_oracle(built.specified, expect.specified);
  check_against_oracle(built.unspecified, expect.unspecified);
  CHECK(built.stats.read == expect.lines);
  CHECK(built.stats.out_of_year == expect.out_of_year);
  CHECK(built.stats.reconciles());
}

TEST_CASE("order independence and shard equivalence") {
  auto c = small_corpus(5);
  const auto ref = build_od_tensor(c.records, c.registry, 2024, TimeCategory::Specified);
  REQUIRE(ref.total() > 0);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(c.records.begin(), c.records.end(), rng);
    CHECK(build_od_tensor(c.records, c.registry, 2024, TimeCategory::Specified) == ref);

    const std::size_t shards = 2 + trial;
    std::vector<std::size_t> cuts{0, c.records.size()};
    std::uniform_int_distribution<std::size_t> cut(0, c.records.size());
    for (std::size_t k = 1; k < shards; ++k) cuts.push_back(cut(rng));
    std::sort(cuts.begin(), cuts.end());
    OdTensor merged(2024, TimeCategory::Specified, static_cast<std::uint32_t>(c.registry.size()));
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      std::span<const SearchRecord> shard(c.records.data() + cuts[k], cuts[k + 1] - cuts[k]);
      merged = merge(merged, build_od_tensor(shard, c.registry, 2024, TimeCategory::Specified));
    }
    CHECK(merged == ref);
  }
}

TEST_CASE("merge algebra") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = testing::to_tensor(oracle::random_cube(rng, 6, 30, 0.05), 2023);
    const auto b = testing::to_tensor(oracle::random_cube(rng, 6, 30, 0.05), 2023);
    const auto c = testing::to_tensor(oracle::random_cube(rng, 6, 30, 0.05), 2023);
    const OdTensor zero(2023, TimeCategory::Specified, 6);
    CHECK(merge(a, zero) == a);
    CHECK(merge(a, b) == merge(b, a));
    CHECK(merge(merge(a, b), c) == merge(a, merge(b, c)));
    CHECK(merge(a, b).total() == a.total() + b.total());
    for (std::uint32_t t = 0; t < 30; ++t) {
      CHECK(merge(a, b).at(1, 2, t) == a.at(1, 2, t) + b.at(1, 2, t));
    }
  }
}

TEST_CASE("merge rejects mismatched metadata and overflowing cells") {
  const OdTensor a(2023, TimeCategory::Specified, 4);
  CHECK_THROWS_AS(merge(a, OdTensor(2024, TimeCategory::Specified, 4)), Error);
  CHECK_THROWS_AS(merge(a, OdTensor(2023, TimeCategory::Unspecified, 4)), Error);
  CHECK_THROWS_AS(merge(a, OdTensor(2023, TimeCategory::Specified, 5)), Error);

  std::vector<std::vector<CellCount>> slabs(365);
  slabs[3].push_back({1, 2, std::numeric_limits<std::uint32_t>::max()});
  const auto big = OdTensor::from_slabs(2023, TimeCategory::Specified, 4, slabs);
  slabs[3][0].count = 1;
  const auto one = OdTensor::from_slabs(2023, TimeCategory::Specified, 4, slabs);
  try {
    merge(big, one);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("from_slabs validates its input") {
  std::vector<std::vector<CellCount>> slabs(365);
  slabs[0] = {{1, 1, 1}, {0, 1, 1}};
  CHECK_THROWS_AS(OdTensor::from_slabs(2023, TimeCategory::Specified, 3, slabs), Error);
  slabs[0] = {{0, 1, 0}};
  CHECK_THROWS_AS(OdTensor::from_slabs(2023, TimeCategory::Specified, 3, slabs), Error);
  slabs[0] = {{0, 3, 1}};
  CHECK_THROWS_AS(OdTensor::from_slabs(2023, TimeCategory::Specified, 3, slabs), Error);
  CHECK_THROWS_AS(OdTensor::from_slabs(2024, TimeCategory::Specified, 3, std::vector<std::vector<CellCount>>(365)), Error);
}

TEST_CASE("accumulator compaction keeps exact counts") {
  SlabAccumulator acc(2, 4);
  // Enough increments on one day to trigger several compactions.
  for (int k = 0; k < 300000; ++k) acc.add(1, k % 4, (k / 4) % 4);
  const auto slabs = acc.finish();
  CHECK(slabs[0].empty());
  REQUIRE(slabs[1].size() == 16);
  for (const auto& c : slabs[1]) CHECK(c.count == 300000 / 16);
}

TEST_CASE("dense day view") {
  std::vector<std::vector<CellCount>> slabs(365);
  slabs[10] = {{0, 2, 4}, {2, 1, 7}};
  const auto t = OdTensor::from_slabs(2023, TimeCategory::Unspecified, 3, slabs);
  const auto d = t.dense_day(10);
  CHECK(d[0 * 3 + 2] == 4);
  CHECK(d[2 * 3 + 1] == 7);
  CHECK(std::count(d.begin(), d.end(), 0u) == 7);
}

TEST_CASE("ingest_log_csv: header, threads, malformed rows") {
  const auto c = small_corpus(17, 25, 0.02);
  std::ostringstream csv;
  csv << "search_time,departure_ic,arrival_ic,specified_time\n";
  for (const auto& r : c.records) csv << format_record(r) << '\n';

  IngestOptions opts;
  opts.year = 2023;
  opts.has_header = true;
  std::istringstream in1(csv.str());
  const auto seq = ingest_log_csv(in1, c.registry, opts);
  CHECK(seq.stats.read == c.records.size());
  CHECK(seq.stats.reconciles());
  CHECK(seq.unspecified == build_od_tensor(c.records, c.registry, 2023, TimeCategory::Unspecified));
  CHECK(seq.specified == build_od_tensor(c.records, c.registry, 2023, TimeCategory::Specified));

  opts.threads = 3;
  std::istringstream in2(csv.str());
  const auto par = ingest_log_csv(in2, c.registry, opts);
  CHECK(par.unspecified == seq.unspecified);
  CHECK(par.specified == seq.specified);
  CHECK(par.stats == seq.stats);

  const std::string broken = "2023-01-05T10:00,IC0001,IC0002,\nnot a record\n2023-01-05T10:00,IC0003,IC0002,\n";
  opts.threads = 1;
  opts.has_header = false;
  std::istringstream in3(broken);
  try {
    ingest_log_csv(in3, c.registry, opts);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  opts.skip_malformed = true;
  std::istringstream in4(broken);
  const auto skipped = ingest_log_csv(in4, c.registry, opts);
  CHECK(skipped.stats.malformed == 1);
  CHECK(skipped.stats.read == 3);
  CHECK(skipped.stats.reconciles());
}
