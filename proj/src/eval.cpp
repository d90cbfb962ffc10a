#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace almd {

PRF PRF::from_counts(double tp, double fp, double fn) {
  PRF prf;
  prf.tp = tp;
  prf.fp = fp;
  prf.fn = fn;
  prf.precision = (tp + fp) > 0 ? tp / (tp + fp) : 1.0;
  prf.recall = (tp + fn) > 0 ? tp / (tp + fn) : 1.0;
  double pr = prf.precision + prf.recall;
  prf.f = pr > 0 ? 2.0 * prf.precision * prf.recall / pr : 0.0;
  return prf;
}

namespace {

struct Counts {
  double tp = 0, fp = 0, fn = 0;
};

bool level_included(MentionLevel level,
                    const std::optional<std::vector<MentionLevel>>& filter) {
  if (!filter) return true;
  return std::find(filter->begin(), filter->end(), level) != filter->end();
}

void count_matches(const std::vector<Mention>& pred,
                   const std::vector<Mention>& gold, Counts& counts) {
  std::vector<Mention> p = pred, g = gold;
  std::sort(p.begin(), p.end());
  std::sort(g.begin(), g.end());
  std::vector<Mention> matched;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(),
                        std::back_inserter(matched));
  counts.tp += static_cast<double>(matched.size());
  counts.fp += static_cast<double>(p.size() - matched.size());
  counts.fn += static_cast<double>(g.size() - matched.size());
}

}  // namespace

PRFBundle evaluate(const std::vector<std::vector<Mention>>& predicted,
                   const Corpus& gold,
                   const std::optional<std::vector<MentionLevel>>& level_filter) {
  if (predicted.size() != gold.sentences.size())
    fail(ErrorKind::Structure,
         "prediction list (" + std::to_string(predicted.size()) +
             " sentences) is not aligned with gold (" +
             std::to_string(gold.sentences.size()) + ")");

  Counts overall;
  std::map<std::string, Counts> per_cat;
  std::map<MentionLevel, Counts> per_level;
  const std::vector<MentionLevel> levels =
      level_filter ? *level_filter
                   : std::vector<MentionLevel>{MentionLevel::Nam,
                                               MentionLevel::Nom,
                                               MentionLevel::Pro};

  for (std::size_t i = 0; i < predicted.size(); ++i) {
    std::vector<Mention> p, g;
    for (const auto& m : predicted[i])
      if (level_included(m.level, level_filter)) p.push_back(m);
    for (const auto& m : gold.sentences[i].mentions)
      if (level_included(m.level, level_filter)) g.push_back(m);

    count_matches(p, g, overall);
    for (const auto& cat : gold.categories) {
      std::vector<Mention> pc, gc;
      for (const auto& m : p)
        if (m.category == cat) pc.push_back(m);
      for (const auto& m : g)
        if (m.category == cat) gc.push_back(m);
      count_matches(pc, gc, per_cat[cat]);
    }
    for (auto lvl : levels) {
      std::vector<Mention> pl, gl;
      for (const auto& m : predicted[i])
        if (m.level == lvl) pl.push_back(m);
      for (const auto& m : gold.sentences[i].mentions)
        if (m.level == lvl) gl.push_back(m);
      count_matches(pl, gl, per_level[lvl]);
    }
  }

  PRFBundle bundle;
  bundle.overall = PRF::from_counts(overall.tp, overall.fp, overall.fn);
  for (const auto& [cat, c] : per_cat)
    bundle.per_category[cat] = PRF::from_counts(c.tp, c.fp, c.fn);
  for (const auto& [lvl, c] : per_level)
    bundle.per_level[lvl] = PRF::from_counts(c.tp, c.fp, c.fn);
  return bundle;
}

int CurveTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::pair<double, double>> CurveTable::words_f() const {
  int wc = column("words"), fc = column("f");
  if (wc < 0 || fc < 0)
    fail(ErrorKind::Structure, "curve table lacks words/f columns");
  std::vector<std::pair<double, double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows)
    out.emplace_back(row[static_cast<std::size_t>(wc)], row[static_cast<std::size_t>(fc)]);
  return out;
}

double CurveTable::terminal_f() const {
  int fc = column("f");
  if (fc < 0 || rows.empty())
    fail(ErrorKind::Structure, "curve table has no f data");
  return rows.back()[static_cast<std::size_t>(fc)];
}

CurveTable to_table(const LearningCurve& curve) {
  CurveTable table;
  table.columns = {"step", "words", "precision", "recall", "f", "named_f", "nominal_f"};
  for (const auto& cat : curve.categories)
    table.columns.push_back("cat_" + cat + "_f");

  for (const auto& [key, value] : curve.config_echo)
    table.comments.push_back(key + " = " + value);
  if (curve.truncated) table.comments.push_back("warning: " + curve.warning);

  auto level_f = [](const CurvePoint& pt, MentionLevel lvl) {
    auto it = pt.eval.per_level.find(lvl);
    return it == pt.eval.per_level.end() ? 1.0 : it->second.f;
  };
  for (const auto& pt : curve.points) {
    std::vector<double> row = {
        static_cast<double>(pt.step), static_cast<double>(pt.words_labeled),
        pt.eval.overall.precision,    pt.eval.overall.recall,
        pt.eval.overall.f,            level_f(pt, MentionLevel::Nam),
        level_f(pt, MentionLevel::Nom)};
    for (const auto& cat : curve.categories) {
      auto it = pt.eval.per_category.find(cat);
      row.push_back(it == pt.eval.per_category.end() ? 1.0 : it->second.f);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CurveTable average_tables(std::span<const CurveTable> tables) {
  if (tables.empty()) fail(ErrorKind::Structure, "nothing to average");
  CurveTable out;
  out.columns = tables[0].columns;
  for (const auto& c : tables[0].comments)
    if (c.rfind("run.seed ", 0) != 0 && c.rfind("run.seed=", 0) != 0)
      out.comments.push_back(c);
  out.comments.push_back("averaged_runs = " + std::to_string(tables.size()));
  std::size_t max_rows = 0;
  for (const auto& t : tables) {
    if (t.columns != out.columns)
      fail(ErrorKind::Structure, "cannot average tables with different columns");
    max_rows = std::max(max_rows, t.rows.size());
  }
  for (std::size_t r = 0; r < max_rows; ++r) {
    std::vector<double> sum(out.columns.size(), 0.0);
    int n = 0;
    for (const auto& t : tables) {
      if (r >= t.rows.size()) continue;
      for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += t.rows[r][c];
      ++n;
    }
    for (double& v : sum) v /= n;
    out.rows.push_back(std::move(sum));
  }
  return out;
}

namespace {

std::string fmt_cell(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_table_csv(const CurveTable& table, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorKind::Io, "cannot write curve file: " + tmp);
    for (const auto& c : table.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out << ',';
      out << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << fmt_cell(row[i]);
      }
      out << '\n';
    }
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      fail(ErrorKind::Io, "curve write failed: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot rename " + tmp + " to " + path);
  }
}

CurveTable read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open curve file: " + path);
  CurveTable table;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
      table.comments.push_back(line.substr(start));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!saw_header) {
      table.columns = cells;
      saw_header = true;
      continue;
    }
    if (cells.size() != table.columns.size())
      fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) +
                                 ": expected " + std::to_string(table.columns.size()) +
                                 " cells, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        double v = std::stod(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
        row.push_back(v);
      } catch (const std::exception&) {
        fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) +
                                   ": bad numeric cell `" + c + "`");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!saw_header) fail(ErrorKind::Parse, path + ": no header row");
  return table;
}

std::optional<double> words_to_reach(
    const std::vector<std::pair<double, double>>& curve, double target_f) {
  if (curve.empty()) return std::nullopt;
  if (curve[0].second >= target_f) return curve[0].first;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].second < target_f) continue;
    const auto& [w0, f0] = curve[i - 1];
    const auto& [w1, f1] = curve[i];
    return w0 + (target_f - f0) * (w1 - w0) / (f1 - f0);
  }
  return std::nullopt;
}

std::optional<double> words_to_reach(const LearningCurve& curve, double target_f) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size());
  for (const auto& pt : curve.points)
    pts.emplace_back(static_cast<double>(pt.words_labeled), pt.eval.overall.f);
  return words_to_reach(pts, target_f);
}

std::optional<double> words_to_reach(const CurveTable& table, double target_f) {
  return words_to_reach(table.words_f(), target_f);
}

std::optional<double> data_savings(const CurveTable& strategy,
                                   const CurveTable& baseline, double target_f) {
  auto ws = words_to_reach(strategy, target_f);
  auto wb = words_to_reach(baseline, target_f);
  if (!ws || !wb || *wb <= 0) return std::nullopt;
  return *ws / *wb;
}

}  // namespace almd
