#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "contribscope/contribscope.hpp"
#include "support.hpp"

using namespace contribscope;
using testsupport::TempDir;
using testsupport::write_file;

// --- taxonomy ---------------------------------------------------------------

TEST(Taxonomy, ParseRenderRoundTrip) {
  for (Label l : kAllLabels) EXPECT_EQ(parse_label(render_label(l)), l);
}

TEST(Taxonomy, ParseIsCaseInsensitive) {
  EXPECT_EQ(parse_label("a-method"), Label::AMethod);
  EXPECT_EQ(parse_label("K-People"), Label::KPeople);
  EXPECT_EQ(parse_label("  K-TASK "), Label::KTask);
}

TEST(Taxonomy, UnknownLabelListsValidNames) {
  try {
    parse_label("metric");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    for (auto n : kLabelNames) EXPECT_NE(msg.find(n), std::string::npos) << n;
  }
}

TEST(Taxonomy, KindsPartitionLabels) {
  const auto k = labels_of_kind(ContributionKind::Knowledge);
  const auto a = labels_of_kind(ContributionKind::Artifact);
  EXPECT_EQ(k, (std::vector<Label>{Label::KDataset, Label::KLanguage, Label::KMethod, Label::KPeople, Label::KTask}));
  EXPECT_EQ(a, (std::vector<Label>{Label::ADataset, Label::AMethod, Label::ATask}));
  std::set<Label> all(k.begin(), k.end());
  for (Label l : a) EXPECT_TRUE(all.insert(l).second);
  EXPECT_EQ(all.size(), kNumLabels);
  for (Label l : kAllLabels) {
    const bool in_k = std::find(k.begin(), k.end(), l) != k.end();
    EXPECT_EQ(kind_of(l) == ContributionKind::Knowledge, in_k);
  }
}

TEST(Taxonomy, LabelSetHasNoDuplicates) {
  LabelSet s;
  s.insert(Label::KTask);
  s.insert(Label::KTask);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_TRUE(LabelSet{}.empty());
  EXPECT_EQ(parse_label_list(std::vector<std::string>{"k-task", "K-TASK", "a-method"}).size(), 2u);
}

// --- venues -----------------------------------------------------------------

TEST(Venue, KnownStrings) {
  EXPECT_EQ(normalize_venue("Proceedings of the 35th Annual Meeting of the Association for Computational Linguistics"),
            Venue::ACL);
  EXPECT_EQ(normalize_venue("EACL97"), Venue::EACL);
  EXPECT_EQ(normalize_venue("Findings of the Association for Computational Linguistics: EMNLP 2021"),
            Venue::Findings);
  EXPECT_EQ(normalize_venue("Transactions of the Association for Computational Linguistics"), Venue::TACL);
  EXPECT_EQ(normalize_venue("Computational Linguistics"), Venue::CL);
  EXPECT_EQ(normalize_venue("*SEM 2012"), Venue::StarSem);
  EXPECT_EQ(normalize_venue("Proceedings of CoNLL"), Venue::CoNLL);
  EXPECT_EQ(normalize_venue("NAACL-HLT"), Venue::NAACL);
  EXPECT_EQ(normalize_venue("AACL-IJCNLP"), Venue::AACL);
  EXPECT_EQ(normalize_venue("emnlp"), Venue::EMNLP);
  EXPECT_EQ(normalize_venue("Workshop on Something Else"), Venue::Other);
  EXPECT_EQ(normalize_venue(""), Venue::Other);
}

TEST(Venue, NormalizationIsTotalAndCaseInsensitive) {
  Rng rng(3);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzACLEMNPT *-:0123456789";
  for (int t = 0; t < 2000; ++t) {
    std::string s;
    const auto len = uniform_index(rng, 30);
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[uniform_index(rng, alphabet.size())]);
    const Venue v = normalize_venue(s);
    EXPECT_LT(static_cast<std::size_t>(v), kAllVenues.size());
    EXPECT_EQ(normalize_venue(text::to_lower(s)), v) << s;
    std::string upper = s;
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    EXPECT_EQ(normalize_venue(upper), v) << s;
  }
}

TEST(Venue, CanonicalNamesParse) {
  for (Venue v : kAllVenues) EXPECT_EQ(parse_venue_name(venue_name(v)), v);
  EXPECT_THROW(parse_venue_name("NEURIPS"), UsageError);
}

// --- paper records ----------------------------------------------------------

TEST(Papers, ThreeValidLinesInOrder) {
  std::istringstream in(
      R"({"paper_id":"b","title":"T","abstract":"A.","venue":"ACL","year":2001}
{"paper_id":"a","abstract":"B."}
{"paper_id":"c","abstract":"C.","month":3,"citation_count":7}
)");
  const auto r = load_papers_from(in);
  ASSERT_EQ(r.papers.size(), 3u);
  EXPECT_EQ(r.papers[0].paper_id, "b");
  EXPECT_EQ(r.papers[1].paper_id, "a");
  EXPECT_EQ(r.papers[2].paper_id, "c");
  EXPECT_EQ(r.papers[2].citation_count, 7);
}

TEST(Papers, MissingAbstractNamesLine) {
  std::istringstream in(R"({"paper_id":"a","abstract":"x"}
{"paper_id":"b","title":"no abstract"}
)");
  try {
    load_papers_from(in);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "line 2: missing field abstract");
  }
}

TEST(Papers, MalformedAndDuplicate) {
  std::istringstream bad("{\"paper_id\":\"a\",\"abstract\":\"x\"}\n{oops\n");
  try {
    load_papers_from(bad);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 2:", 0), 0u);
  }
  std::istringstream dup("{\"paper_id\":\"a\",\"abstract\":\"x\"}\n{\"paper_id\":\"a\",\"abstract\":\"y\"}\n");
  EXPECT_THROW(load_papers_from(dup), DataError);
}

TEST(Papers, OutOfRangeYearIsCountedNotFatal) {
  std::istringstream in("{\"paper_id\":\"a\",\"abstract\":\"x\",\"year\":3000}\n");
  const auto r = load_papers_from(in);
  EXPECT_EQ(r.unparseable_years, 1u);
  EXPECT_FALSE(r.papers[0].year.has_value());
}

TEST(Papers, FixtureLineCount) {
  const std::string path = testsupport::fixture("papers.jsonl");
  std::ifstream in(path);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) lines += line.empty() ? 0 : 1;
  EXPECT_EQ(load_papers(path).size(), lines);
  EXPECT_EQ(lines, 1995u);
}

TEST(Papers, SaveLoadRoundTrip) {
  synthetic::Options opt;
  opt.papers = 60;
  auto corpus = synthetic::make_corpus(opt);
  corpus.papers[0].event_keys = {"ACL97", "EACL97"};
  corpus.papers[1].title = "Quotes \" and \\ backslashes, unicode caf\xc3\xa9";
  corpus.papers[2].year.reset();
  TempDir dir;
  save_papers(dir.file("p.jsonl"), corpus.papers);
  const auto back = load_papers(dir.file("p.jsonl"));
  ASSERT_EQ(back.size(), corpus.papers.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& a = corpus.papers[i];
    const auto& b = back[i];
    EXPECT_EQ(a.paper_id, b.paper_id);
    EXPECT_EQ(a.title, b.title);
    EXPECT_EQ(a.abstract, b.abstract);
    EXPECT_EQ(a.sentences, b.sentences);
    EXPECT_EQ(a.venue, b.venue);
    EXPECT_EQ(a.year, b.year);
    EXPECT_EQ(a.month, b.month);
    EXPECT_EQ(a.citation_count, b.citation_count);
    EXPECT_EQ(a.event_keys, b.event_keys);
  }
}

// --- BibTeX -----------------------------------------------------------------

TEST(Bibtex, SingleInproceedings) {
  const auto r = parse_bibtex(R"(@inproceedings{key1,
  title = {A Title},
  booktitle = {Proceedings of ACL},
  year = 1997
})");
  ASSERT_EQ(r.entries.size(), 1u);
  const auto& e = r.entries.at("key1");
  EXPECT_EQ(e.entry_type, "inproceedings");
  EXPECT_EQ(e.title, "A Title");
  EXPECT_EQ(e.venue, "Proceedings of ACL");
  EXPECT_EQ(e.year, 1997);
}

TEST(Bibtex, NestedBracesPreserved) {
  const auto r = parse_bibtex("@article{k, title = {The {BERT} model for {{N}LP}}, journal = \"Computational Linguistics\"}");
  const auto& e = r.entries.at("k");
  EXPECT_EQ(e.title, "The {BERT} model for {{N}LP}");
  EXPECT_EQ(e.venue, "Computational Linguistics");
}

TEST(Bibtex, MacrosMonthsAndConcatenation) {
  const auto r = parse_bibtex(R"(@string{acl = "Annual Meeting"}
@comment{ignored { stuff }}
@inproceedings(p, title = "X", booktitle = acl # " of ACL", month = jul, year = "2018")
)");
  const auto& e = r.entries.at("p");
  EXPECT_EQ(e.venue, "Annual Meeting of ACL");
  EXPECT_EQ(e.month, 7);
  EXPECT_EQ(e.year, 2018);
}

TEST(Bibtex, UnbalancedBraceReportsOffset) {
  const std::string src = "@article{k, title = {oops, year = 2000\n";
  try {
    parse_bibtex(src);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("at byte "), std::string::npos) << e.what();
  }
}

TEST(Bibtex, DuplicateKeyLastWins) {
  const auto r = parse_bibtex("@misc{k, title={first}}\n@misc{k, title={second}}\n");
  EXPECT_EQ(r.entries.at("k").title, "second");
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("k"), std::string::npos);
}

// --- segmentation -----------------------------------------------------------

TEST(Segment, TwoSentences) {
  EXPECT_EQ(segment_sentences("We present X. Results show Y."),
            (std::vector<std::string>{"We present X.", "Results show Y."}));
}

TEST(Segment, AbbreviationGuard) {
  EXPECT_EQ(segment_sentences("This follows the method as shown by Smith et al. in 2020.").size(), 1u);
  EXPECT_EQ(segment_sentences("Results improve, e.g. On the test set we win. Next we stop.").size(), 2u);
  // Only listed abbreviations guard; a lone capital is a normal word.
  EXPECT_EQ(segment_sentences("We use model B. Then we stop.").size(), 2u);
  EXPECT_EQ(segment_sentences("See Fig. 3 for details. It helps.").size(), 2u);
}

TEST(Segment, EveryAbbreviationGuards) {
  for (auto abbr : kAbbreviations) {
    const std::string s = "Prefix " + std::string(abbr) + " Next part ends here.";
    EXPECT_EQ(segment_sentences(s).size(), 1u) << abbr;
  }
}

TEST(Segment, TerminatorsAndClosers) {
  EXPECT_EQ(segment_sentences("Is it good? Yes! It works (mostly.) Then 3 more.").size(), 4u);
  EXPECT_EQ(segment_sentences("lowercase. does not split.").size(), 1u);
  EXPECT_THROW(segment_sentences("   "), DataError);
}

TEST(Segment, FixtureAbstractsMatchGenerator) {
  std::map<std::string, std::vector<std::string>> generated;
  for (const auto& a : load_annotations(testsupport::fixture("annotations.jsonl"))) {
    auto& v = generated[a.paper_id];
    if (v.size() <= a.sentence_index) v.resize(a.sentence_index + 1);
    v[a.sentence_index] = a.text;
  }
  for (const auto& p : load_papers(testsupport::fixture("papers.jsonl"))) {
    const auto segs = segment_sentences(p.abstract);
    std::size_t periods = static_cast<std::size_t>(std::count(p.abstract.begin(), p.abstract.end(), '.'));
    ASSERT_EQ(segs.size(), periods) << p.paper_id;
    ASSERT_EQ(segs, generated[p.paper_id]) << p.paper_id;
  }
}

TEST(Segment, RoundTripProperty) {
  Rng rng(11);
  const std::vector<std::string> words = {"We", "model", "e.g.", "et", "al.", "Fig.", "3.5", "results.", "It",
                                          "works!", "Why?", "(see", "this.)", "A.", "\"quoted.\"", "x", "12"};
  for (int t = 0; t < 1000; ++t) {
    std::string s;
    const auto n = 1 + uniform_index(rng, 25);
    for (std::size_t i = 0; i < n; ++i) {
      s += words[uniform_index(rng, words.size())];
      s += uniform_index(rng, 4) == 0 ? "  \n\t" : " ";
    }
    const auto segs = segment_sentences(s);
    std::string joined;
    for (const auto& seg : segs) {
      if (!joined.empty()) joined += ' ';
      joined += seg;
      EXPECT_NE(text::collapse_whitespace(s).find(seg), std::string::npos);
    }
    EXPECT_EQ(text::collapse_whitespace(joined), text::collapse_whitespace(s));
  }
}

// --- merge and dedup --------------------------------------------------------

namespace {

PaperRecord rec(std::string id, std::string title, std::string venue, int year) {
  PaperRecord p;
  p.paper_id = std::move(id);
  p.title = std::move(title);
  p.abstract = "Text.";
  p.venue = make_venue(std::move(venue));
  p.year = year;
  return p;
}

}  // namespace

TEST(Dedup, DualListedPaperCollapses) {
  std::vector<PaperRecord> ps = {rec("P97-1001", "Parsing With Style", "ACL", 1997),
                                 rec("E97-1001", "Parsing with style!", "EACL", 1997)};
  IngestReport rep;
  const auto out = merge_and_dedup(ps, {}, &rep);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].paper_id, "P97-1001");
  EXPECT_EQ(out[0].event_keys, (std::set<std::string>{"ACL97", "EACL97"}));
  EXPECT_EQ(rep.deduped, 1u);
}

TEST(Dedup, DisjointIdsKeepCount) {
  std::vector<PaperRecord> ps;
  for (int i = 0; i < 50; ++i) ps.push_back(rec("p" + std::to_string(i), "Title " + std::to_string(i), "ACL", 2000));
  EXPECT_EQ(merge_and_dedup(ps, {}).size(), ps.size());
}

TEST(Dedup, SameTitleDifferentYearKept) {
  std::vector<PaperRecord> ps = {rec("a", "Same", "ACL", 2000), rec("b", "Same", "ACL", 2001)};
  EXPECT_EQ(merge_and_dedup(ps, {}).size(), 2u);
}

TEST(Dedup, EmptyTitlesNeverCollapse) {
  std::vector<PaperRecord> ps = {rec("a", "", "ACL", 2000), rec("b", "  ", "ACL", 2000)};
  EXPECT_EQ(merge_and_dedup(ps, {}).size(), 2u);
}

TEST(Dedup, Idempotent) {
  synthetic::Options opt;
  opt.papers = 300;
  opt.dual_listed = 25;
  const auto corpus = synthetic::make_corpus(opt);
  const auto meta = parse_bibtex(corpus.bibtex).entries;
  const auto once = merge_and_dedup(corpus.papers, meta);
  const auto twice = merge_and_dedup(once, meta);
  EXPECT_EQ(once.size(), 300u);
  EXPECT_EQ(once, twice);
}

TEST(Dedup, MetadataOverridesAndFlagsUnresolved) {
  auto p = rec("k1", "old", "", 1990);
  auto q = rec("k2", "other", "", 1990);
  const auto meta = parse_bibtex("@inproceedings{k1, title={New {T}itle}, booktitle={EMNLP}, year=2005, month=may}")
                        .entries;
  IngestReport rep;
  const auto out = merge_and_dedup({p, q}, meta, &rep);
  EXPECT_EQ(out[0].title, "New Title");
  EXPECT_EQ(out[0].venue.canonical, Venue::EMNLP);
  EXPECT_EQ(out[0].year, 2005);
  EXPECT_EQ(out[0].month, 5);
  EXPECT_TRUE(out[0].metadata_resolved);
  EXPECT_FALSE(out[1].metadata_resolved);
  EXPECT_EQ(rep.unresolved_metadata, 1u);
}

TEST(Ingest, FixtureEndToEnd) {
  const auto r = ingest(testsupport::fixture("papers.jsonl"), testsupport::fixture("anthology.bib"), {});
  EXPECT_EQ(r.report.loaded, 1995u);
  EXPECT_EQ(r.report.unresolved_metadata, 0u);
  EXPECT_EQ(r.papers.size(), r.report.records);
  for (const auto& p : r.papers) {
    ASSERT_FALSE(p.sentences.empty());
    ASSERT_TRUE(p.year.has_value());
  }
}

TEST(Ingest, VenueAllowlist) {
  const auto all = ingest(testsupport::fixture("papers.jsonl"), std::nullopt, {});
  const auto acl = ingest(testsupport::fixture("papers.jsonl"), std::nullopt, {Venue::ACL});
  std::size_t expected = 0;
  for (const auto& p : all.papers) expected += p.venue.canonical == Venue::ACL ? 1 : 0;
  EXPECT_EQ(acl.papers.size(), expected);
  EXPECT_EQ(acl.report.excluded_by_venue, all.papers.size() - expected);
}
