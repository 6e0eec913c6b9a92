// Regenerates the shipped fixture files under data/fixtures/.
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "contribscope/synthetic.hpp"

int main(int argc, char** argv) {
  namespace cs = contribscope;
  std::string out = "data/fixtures";
  cs::synthetic::Options opt;
  opt.second_annotator = 100;
  CLI::App app{"write the synthetic fixture corpus"};
  app.add_option("--out", out)->capture_default_str();
  app.add_option("--papers", opt.papers)->capture_default_str();
  app.add_option("--seed", opt.seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const auto c = cs::synthetic::make_corpus(opt);
  cs::save_papers(out + "/papers.jsonl", cs::synthetic::raw_records(c.papers));
  cs::save_annotations(out + "/annotations.jsonl", c.gold);
  cs::save_annotations(out + "/annotations_dual.jsonl", c.dual);
  std::ofstream(out + "/anthology.bib", std::ios::binary) << c.bibtex;
  std::cout << c.papers.size() << " papers, " << c.gold.size() << " sentences, " << c.dual.size()
            << " dual-annotation rows\n";
  return 0;
}
