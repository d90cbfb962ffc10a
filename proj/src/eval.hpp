#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "corpus.hpp"

namespace almd {

// Counts are doubles so that pointwise averages of curves stay exact
// for integers and well defined for means.
struct PRF {
  double precision = 1.0;  // 1 when tp+fp == 0
  double recall = 1.0;     // 1 when tp+fn == 0
  double f = 1.0;          // harmonic mean; 0 when p+r == 0
  double tp = 0, fp = 0, fn = 0;

  static PRF from_counts(double tp, double fp, double fn);
};

struct PRFBundle {
  PRF overall;
  std::map<std::string, PRF> per_category;
  std::map<MentionLevel, PRF> per_level;
};

// Exact-match (span, category, level) mention scoring of predictions
// against gold, one mention set per gold sentence. level_filter, when
// given, restricts both sides before counting; per-level entries are
// computed per level regardless.
PRFBundle evaluate(const std::vector<std::vector<Mention>>& predicted,
                   const Corpus& gold,
                   const std::optional<std::vector<MentionLevel>>& level_filter =
                       std::nullopt);

struct CurvePoint {
  int step = 0;  // 0 is the seed-only point
  std::uint64_t words_labeled = 0;
  std::uint64_t batch_words = 0;
  PRFBundle eval;
};

struct LearningCurve {
  std::vector<std::string> categories;  // column order for export
  std::vector<CurvePoint> points;       // words_labeled strictly increasing
  std::vector<std::pair<std::string, std::string>> config_echo;
  bool truncated = false;
  std::string warning;
};

// Tabular curve: exactly what the CSV holds. Column order is
// step,words,precision,recall,f,named_f,nominal_f then one
// cat_<NAME>_f column per category.
struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // written as leading `# ` lines

  int column(const std::string& name) const;  // -1 when absent
  // (words, overall f) pairs for reachability queries.
  std::vector<std::pair<double, double>> words_f() const;
  double terminal_f() const;
};

CurveTable to_table(const LearningCurve& curve);

// Pointwise mean over tables, aligned on step index. Rows past the end
// of a shorter (truncated) table average over the tables that have them.
CurveTable average_tables(std::span<const CurveTable> tables);

// Write-then-rename; a failed write never leaves a partial file behind.
void write_table_csv(const CurveTable& table, const std::string& path);
CurveTable read_table_csv(const std::string& path);

// Smallest words_labeled at which overall F reaches target_f, linearly
// interpolating between adjacent points; nullopt when never reached.
std::optional<double> words_to_reach(
    const std::vector<std::pair<double, double>>& curve, double target_f);
std::optional<double> words_to_reach(const LearningCurve& curve, double target_f);
std::optional<double> words_to_reach(const CurveTable& table, double target_f);

// words_to_reach(strategy) / words_to_reach(baseline); nullopt when
// either curve never reaches the target.
std::optional<double> data_savings(const CurveTable& strategy,
                                   const CurveTable& baseline, double target_f);

}  // namespace almd
