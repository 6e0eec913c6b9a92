#include <gtest/gtest.h>

#include <cmath>

#include "contribscope/contribscope.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace contribscope;

namespace {

LabeledPaper paper(std::string id, Venue v, std::optional<int> year, std::vector<LabelSet> sents,
                   std::optional<long long> cites = std::nullopt) {
  return {std::move(id), v, year, cites, std::move(sents)};
}

}  // namespace

// --- PMI --------------------------------------------------------------------

TEST(Pmi, AlwaysTogetherAtQuarterRate) {
  // a and b each in 25% of labeled statements, always together.
  std::vector<LabelSet> s;
  s.push_back({Label::KTask, Label::AMethod});
  for (int i = 0; i < 3; ++i) s.push_back({Label::KPeople});
  s.push_back({});  // ignored
  const auto m = pmi_matrix(s);
  EXPECT_EQ(m.statements, 4u);
  EXPECT_NEAR(*m.pmi[index_of(Label::KTask)][index_of(Label::AMethod)], 2.0, 1e-12);
  EXPECT_NEAR(*m.pmi[index_of(Label::KTask)][index_of(Label::KTask)], 2.0, 1e-12);
  EXPECT_FALSE(m.pmi[index_of(Label::KTask)][index_of(Label::KPeople)].has_value());
}

TEST(Pmi, IndependenceGivesZero) {
  // Joint equals product: every combination of {a present/absent} x {b present/absent}
  // with a third label keeping every statement non-empty.
  std::vector<LabelSet> s;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      LabelSet x{Label::KPeople};
      if (a) x.insert(Label::KTask);
      if (b) x.insert(Label::AMethod);
      s.push_back(x);
    }
  }
  const auto m = pmi_matrix(s);
  EXPECT_NEAR(*m.pmi[index_of(Label::KTask)][index_of(Label::AMethod)], 0.0, 1e-12);
  EXPECT_NEAR(*m.pmi[index_of(Label::KPeople)][index_of(Label::KTask)], 0.0, 1e-12);
}

TEST(Pmi, AllEmptyRejected) { EXPECT_THROW(pmi_matrix({{}, {}}), DataError); }

TEST(Pmi, SymmetryScaleInvarianceAndOracle) {
  Rng rng(4);
  for (int t = 0; t < 300; ++t) {
    std::vector<LabelSet> s;
    const auto n = 1 + uniform_index(rng, 25);
    for (std::size_t i = 0; i < n; ++i) s.push_back(LabelSet::from_mask(static_cast<std::uint8_t>(uniform_index(rng, 256))));
    s.push_back(LabelSet{Label::KTask});
    const auto m = pmi_matrix(s);
    const auto o = oracle::pmi(s);
    std::vector<LabelSet> tripled;
    for (int k = 0; k < 3; ++k) tripled.insert(tripled.end(), s.begin(), s.end());
    const auto m3 = pmi_matrix(tripled);
    for (std::size_t a = 0; a < kNumLabels; ++a) {
      for (std::size_t b = 0; b < kNumLabels; ++b) {
        ASSERT_EQ(m.pmi[a][b].has_value(), o[a][b].has_value());
        EXPECT_EQ(m.pmi[a][b], m.pmi[b][a]);
        ASSERT_EQ(m3.pmi[a][b].has_value(), m.pmi[a][b].has_value());
        if (!m.pmi[a][b]) continue;
        EXPECT_NEAR(*m.pmi[a][b], *o[a][b], 1e-9);
        EXPECT_NEAR(*m3.pmi[a][b], *m.pmi[a][b], 1e-12);
      }
    }
  }
}

TEST(Pmi, TableFlagsUndefined) {
  const auto t = pmi_table(pmi_matrix({{Label::KTask}, {Label::AMethod}}));
  EXPECT_EQ(t.rows.size(), kNumLabels * kNumLabels);
  const auto csv = t.to_csv();
  EXPECT_NE(csv.find("k-task,a-method,0,0.500000,0.500000,\n"), std::string::npos) << csv;
  EXPECT_NE(t.to_json().find("\"pmi\": null"), std::string::npos);
}

// --- trends -----------------------------------------------------------------

TEST(Trends, TwoPaperArithmetic) {
  std::vector<LabeledPaper> c = {paper("a", Venue::ACL, 2000, {{Label::AMethod}, {}}),
                                 paper("b", Venue::ACL, 2000, {{Label::KTask}}),
                                 paper("c", Venue::ACL, 2001, {{Label::KTask}}),
                                 paper("d", Venue::ACL, std::nullopt, {{Label::KTask}})};
  const auto ts = yearly_type_share(c);
  ASSERT_EQ(ts.years, (std::vector<int>{2000, 2001}));
  EXPECT_DOUBLE_EQ(ts.share[0][index_of(Label::AMethod)], 50.0);
  EXPECT_DOUBLE_EQ(ts.share[1][index_of(Label::KTask)], 100.0);
  EXPECT_EQ(ts.papers_without_year, 1u);
}

TEST(Trends, RecoversGeneratorRates) {
  Rng rng(6);
  std::map<int, std::array<double, kNumLabels>> rates;
  std::vector<LabeledPaper> c;
  for (int y = 2010; y < 2015; ++y) {
    auto& r = rates[y];
    for (auto& x : r) x = uniform_unit(rng);
    for (int i = 0; i < 1000; ++i) {
      LabelSet s;
      for (Label l : kAllLabels) {
        if (uniform_unit(rng) < r[index_of(l)]) s.insert(l);
      }
      c.push_back(paper("p", Venue::ACL, y, {s}));
    }
  }
  const auto ts = yearly_type_share(c);
  // Per cell, allow 4.5 binomial SDs (SD reaches 1.6 points at 1,000 papers);
  // on average the recovered shares must sit within 2 points.
  double abs_err = 0.0;
  for (std::size_t k = 0; k < ts.years.size(); ++k) {
    for (std::size_t i = 0; i < kNumLabels; ++i) {
      const double p = rates[ts.years[k]][i];
      const double sd = 100.0 * std::sqrt(p * (1.0 - p) / 1000.0);
      EXPECT_NEAR(ts.share[k][i], 100.0 * p, std::max(4.5 * sd, 0.1));
      abs_err += std::abs(ts.share[k][i] - 100.0 * p);
    }
  }
  EXPECT_LE(abs_err / (ts.years.size() * kNumLabels), 2.0);
}

TEST(Trends, OrderInvariantAndBounded) {
  synthetic::Options opt;
  opt.papers = 300;
  const auto sc = synthetic::make_corpus(opt);
  auto c = join_labels(sc.papers, sc.gold);
  const auto base = trend_table(yearly_type_share(c), "t").to_csv();
  Rng rng(1);
  shuffle(c, rng);
  const auto ts = yearly_type_share(c);
  EXPECT_EQ(trend_table(ts, "t").to_csv(), base);
  EXPECT_TRUE(std::is_sorted(ts.years.begin(), ts.years.end()));
  for (const auto& row : ts.share)
    for (double x : row) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 100.0);
    }
}

TEST(Trends, TrailingRollingMean) {
  TrendSeries ts;
  ts.years = {2000, 2001, 2002, 2003};
  ts.papers = {1, 1, 1, 1};
  for (double v : {10.0, 20.0, 30.0, 40.0}) {
    std::array<double, kNumLabels> s{};
    s.fill(v);
    ts.share.push_back(s);
  }
  const auto r = rolling_mean(ts, 3);
  EXPECT_DOUBLE_EQ(r.share[0][0], 10.0);
  EXPECT_DOUBLE_EQ(r.share[1][0], 15.0);
  EXPECT_DOUBLE_EQ(r.share[2][0], 20.0);
  EXPECT_DOUBLE_EQ(r.share[3][0], 30.0);
  EXPECT_EQ(rolling_mean(ts, 1).share, ts.share);
  EXPECT_THROW(rolling_mean(ts, 0), UsageError);
}

// --- venues -----------------------------------------------------------------

TEST(Venues, SaturationAndOmission) {
  std::vector<LabeledPaper> c = {paper("a", Venue::EMNLP, 2000, {{Label::KTask}}),
                                 paper("b", Venue::EMNLP, 2001, {{Label::KTask, Label::AMethod}}),
                                 paper("c", Venue::CL, 2001, {{}})};
  const auto v = venue_profiles(c);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].venue, Venue::EMNLP);
  EXPECT_DOUBLE_EQ(v[0].share[index_of(Label::KTask)], 1.0);
  EXPECT_DOUBLE_EQ(v[0].share[index_of(Label::AMethod)], 0.5);
  EXPECT_EQ(v[1].venue, Venue::CL);
  for (double s : v[1].share) EXPECT_EQ(s, 0.0);
}

// --- similarity -------------------------------------------------------------

TEST(Similarity, Anchors) {
  Distribution p{}, q{}, r{};
  p[0] = 1.0;
  q[0] = 0.5;
  q[1] = 0.5;
  r[2] = 3.0;
  EXPECT_NEAR(jsd_similarity(p, q), 0.6887, 1e-4);
  EXPECT_NEAR(jsd_similarity(p, p), 1.0, 1e-12);
  EXPECT_NEAR(jsd_similarity(p, r), 0.0, 1e-12);
  Distribution zero{};
  EXPECT_THROW(jsd_similarity(p, zero), DataError);
}

TEST(Similarity, PropertiesAndOracle) {
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    Distribution p{}, q{};
    for (std::size_t i = 0; i < kNumLabels; ++i) {
      p[i] = uniform_index(rng, 3) ? static_cast<double>(uniform_index(rng, 20)) : 0.0;
      q[i] = uniform_index(rng, 3) ? static_cast<double>(uniform_index(rng, 20)) : 0.0;
    }
    p[uniform_index(rng, kNumLabels)] += 1;
    q[uniform_index(rng, kNumLabels)] += 1;
    const double s = jsd_similarity(p, q);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_NEAR(s, jsd_similarity(q, p), 1e-12);
    EXPECT_NEAR(jsd_similarity(p, p), 1.0, 1e-12);
    EXPECT_NEAR(s, oracle::jsd_similarity(p, q), 1e-9);
  }
}

TEST(Similarity, SeriesSkipsAndExcludesReference) {
  std::vector<LabeledPaper> c = {paper("a", Venue::ACL, 2000, {{Label::KTask}}),
                                 paper("b", Venue::EMNLP, 2000, {{Label::KTask}}),
                                 paper("c", Venue::EMNLP, 2001, {{Label::AMethod}}),
                                 paper("d", Venue::NAACL, 2000, {{}})};
  const auto s = venue_similarity_series(venue_year_distributions(c), Venue::ACL);
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_EQ(s.points[0].venue, Venue::EMNLP);
  EXPECT_NEAR(s.points[0].similarity, 1.0, 1e-12);
  EXPECT_EQ(s.skipped.size(), 2u);
}

// --- diversity --------------------------------------------------------------

TEST(Diversity, UniqueTypes) {
  EXPECT_EQ(unique_types(paper("a", Venue::ACL, 2000, {{Label::AMethod}, {Label::KTask}, {Label::KTask}})), 2u);
  EXPECT_EQ(unique_types(paper("a", Venue::ACL, 2000, {{}, {}})), 0u);
  std::vector<LabeledPaper> c;
  for (int i = 0; i < 10; ++i) c.push_back(paper("p", Venue::TACL, 2010, {LabelSet::from_mask(0xFF)}));
  const auto d = unique_types_per_paper(c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].mean_unique, 8.0);
}

// --- citations --------------------------------------------------------------

TEST(Citations, OddMedian) {
  std::vector<LabeledPaper> c = {paper("a", Venue::ACL, 2000, {{Label::KTask}}, 1),
                                 paper("b", Venue::ACL, 2000, {{Label::KTask}}, 2),
                                 paper("c", Venue::ACL, 2000, {{Label::KTask}}, 3)};
  CitationFilter f;
  f.maturity = false;
  const auto s = citation_stats(c, f);
  const auto& k = s.per_label[index_of(Label::KTask)];
  EXPECT_EQ(k.papers, 3u);
  EXPECT_DOUBLE_EQ(k.mean, 2.0);
  EXPECT_DOUBLE_EQ(k.median, 2.0);
}

TEST(Citations, EvenMedianAndFilters) {
  std::vector<LabeledPaper> c = {paper("a", Venue::ACL, 2010, {{Label::KTask}}, 1),
                                 paper("b", Venue::ACL, 2010, {{Label::KTask}}, 4),
                                 paper("c", Venue::ACL, 2010, {{Label::KTask}}),
                                 paper("d", Venue::EMNLP, 2010, {{Label::KTask}}, 100),
                                 paper("e", Venue::ACL, 2019, {{Label::KTask}}, 7)};
  CitationFilter f;
  f.venue = Venue::ACL;
  f.as_of_year = 2020;
  const auto s = citation_stats(c, f);
  EXPECT_EQ(s.papers_matched, 2u);
  EXPECT_EQ(s.excluded_missing_citations, 1u);
  EXPECT_EQ(s.excluded_immature, 1u);
  EXPECT_DOUBLE_EQ(s.per_label[index_of(Label::KTask)].median, 2.5);
  f.maturity = false;
  EXPECT_EQ(citation_stats(c, f).papers_matched, 3u);
  f.year = 1990;
  EXPECT_THROW(citation_stats(c, f), DataError);
}

TEST(Citations, MatchGeneratorTallies) {
  synthetic::Options opt;
  opt.papers = 500;
  const auto sc = synthetic::make_corpus(opt);
  const auto corpus = join_labels(sc.papers, sc.gold);
  CitationFilter f;
  f.maturity = false;
  const auto s = citation_stats(corpus, f);
  for (Label l : kAllLabels) {
    std::vector<double> draws;
    for (const auto& p : sc.papers) {
      if (!p.citation_count) continue;
      bool has = false;
      for (const auto& a : sc.gold) has = has || (a.paper_id == p.paper_id && a.gold.contains(l));
      if (has) draws.push_back(static_cast<double>(*p.citation_count));
    }
    const auto& lc = s.per_label[index_of(l)];
    ASSERT_EQ(lc.papers, draws.size());
    if (draws.empty()) continue;
    EXPECT_NEAR(lc.median, oracle::median(draws), 1e-9);
    EXPECT_NEAR(lc.mean, oracle::mean(draws), 1e-9);
    EXPECT_LE(lc.median, *std::max_element(draws.begin(), draws.end()));
    EXPECT_GE(lc.median, *std::min_element(draws.begin(), draws.end()));
  }
}

TEST(Citations, MedianMatchesSortAndPick) {
  Rng rng(10);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(1 + uniform_index(rng, 20));
    for (auto& x : v) x = static_cast<double>(uniform_index(rng, 50));
    EXPECT_NEAR(median(v), oracle::median(v), 1e-12);
    EXPECT_NEAR(mean(v), oracle::mean(v), 1e-9);
  }
  EXPECT_THROW(median({}), DataError);
}

// --- exports ----------------------------------------------------------------

TEST(Table, SixDecimalsAndStableJson) {
  AnalysisTable t{"x", {"k", "n", "v"}, {}, {{"m", 1LL}}};
  t.add_row({std::string("a,b"), 3LL, 1.0 / 3.0});
  t.add_row({std::string("c"), 0LL, -0.0000001});
  t.add_row({std::monostate{}, 1LL, std::monostate{}});
  EXPECT_EQ(t.to_csv(), "k,n,v\n\"a,b\",3,0.333333\nc,0,0.000000\n,1,\n");
  const auto j = nlohmann::json::parse(t.to_json());
  EXPECT_EQ(j.at("analysis"), "x");
  EXPECT_EQ(j.at("rows").size(), 3u);
  EXPECT_TRUE(j.at("rows")[2].at("v").is_null());
  EXPECT_NE(t.to_json().find("0.333333"), std::string::npos);
  EXPECT_THROW(t.add_row({1LL}), std::logic_error);
}
