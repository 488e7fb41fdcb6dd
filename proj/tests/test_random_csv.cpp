// Copyright 2026 The eacp Authors
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

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "eacp/csv.hpp"
#include "eacp/random.hpp"

namespace {

TEST(Substream, DependsOnlyOnTriple) {
  auto a = eacp::substream(42, 7, eacp::Stream::bath);
  auto b = eacp::substream(42, 7, eacp::Stream::bath);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Substream, DistinctTriplesDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t idx = 0; idx < 50; ++idx) {
      for (auto s : {eacp::Stream::bath, eacp::Stream::circuits}) {
        first.insert(eacp::substream(seed, idx, s)());
      }
    }
  }
  EXPECT_EQ(first.size(), 3u * 50u * 2u);
}

TEST(Csv, FormatRoundTripsExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(eacp::csv::parse_double(eacp::csv::format(v)), v);
  }
  EXPECT_EQ(eacp::csv::format(0.5), "0.5");
  EXPECT_EQ(eacp::csv::format(1.0), "1");
}

TEST(Csv, ParseRejectsGarbage) {
  EXPECT_THROW(eacp::csv::parse_double("1.0x"), eacp::ConfigError);
  EXPECT_THROW(eacp::csv::parse_double(""), eacp::ConfigError);
}

TEST(Csv, WriterAndReaderAgree) {
  std::stringstream s;
  {
    eacp::csv::Writer w(s, {"a", "b", "c"});
    w.row(1, 0.25, std::string("3"));
    w.row(std::size_t{2}, -1e-300, "4.5");
  }
  EXPECT_EQ(s.str(), "a,b,c\n1,0.25,3\n2,-1e-300,4.5\n");
  const auto t = eacp::csv::read(s, {"a", "b", "c"});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][1], -1e-300);
}

TEST(Csv, ReaderRejectsWrongHeaderAndRaggedRows) {
  std::stringstream bad_header("x,y\n1,2\n");
  EXPECT_THROW(eacp::csv::read(bad_header, {"a", "b"}), eacp::ConfigError);
  std::stringstream ragged("a,b\n1\n");
  EXPECT_THROW(eacp::csv::read(ragged, {"a", "b"}), eacp::ConfigError);
}

}  // namespace
