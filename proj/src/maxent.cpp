#include "maxent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace almd {

LabelMap LabelMap::build(const std::vector<std::string>& categories,
                         const std::vector<MentionLevel>& levels) {
  LabelMap map;
  std::vector<std::string> cats = categories;
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  std::vector<MentionLevel> lvls = levels;
  std::sort(lvls.begin(), lvls.end());
  lvls.erase(std::unique(lvls.begin(), lvls.end()), lvls.end());

  map.labels_.push_back(BioLabel{});  // O is id 0
  for (const auto& cat : cats) {
    for (auto lvl : lvls) {
      map.labels_.push_back(BioLabel{BioLabel::Tag::B, cat, lvl});
      map.labels_.push_back(BioLabel{BioLabel::Tag::I, cat, lvl});
    }
  }
  for (int i = 0; i < static_cast<int>(map.labels_.size()); ++i)
    map.index_.emplace(map.labels_[static_cast<std::size_t>(i)].str(), i);
  return map;
}

LabelMap LabelMap::from_sentences(std::span<const Sentence* const> sentences) {
  std::set<std::string> cats;
  std::set<MentionLevel> lvls;
  for (const Sentence* s : sentences) {
    for (const auto& m : s->mentions) {
      cats.insert(m.category);
      lvls.insert(m.level);
    }
  }
  return build({cats.begin(), cats.end()}, {lvls.begin(), lvls.end()});
}

int LabelMap::id(const BioLabel& label) const {
  auto it = index_.find(label.str());
  return it == index_.end() ? -1 : it->second;
}

TrainProblem::TrainProblem(std::span<const Sentence* const> sentences,
                           const LabelMap& labels, FeatureView view)
    : num_labels_(labels.size()) {
  offsets_.push_back(0);
  for (const Sentence* s : sentences) {
    std::vector<BioLabel> gold_tags = encode_bio(s->mentions, s->length());
    for (int i = 0; i < s->length(); ++i) {
      int gold = labels.id(gold_tags[static_cast<std::size_t>(i)]);
      if (gold < 0)
        fail(ErrorKind::Structure,
             "gold label not in label map: " + gold_tags[static_cast<std::size_t>(i)].str());
      FeatureVector fv = extract(view, *s, i, interner_);
      feature_ids_.insert(feature_ids_.end(), fv.begin(), fv.end());
      offsets_.push_back(static_cast<std::uint32_t>(feature_ids_.size()));
      gold_.push_back(gold);
    }
  }
  interner_.freeze();
}

namespace {

// log(sum(exp(s))) with the max factored out; also fills posteriors
// into `scores` when `want_probs`.
double log_sum_exp(std::span<double> scores, bool want_probs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double s : scores) mx = std::max(mx, s);
  double sum = 0;
  if (want_probs) {
    for (double& s : scores) {
      s = std::exp(s - mx);
      sum += s;
    }
    const double inv = 1.0 / sum;
    for (double& s : scores) s *= inv;
  } else {
    for (double s : scores) sum += std::exp(s - mx);
  }
  return mx + std::log(sum);
}

}  // namespace

namespace maxent_detail {

void softmax(std::span<double> scores) { log_sum_exp(scores, true); }

}  // namespace maxent_detail

double TrainProblem::value(std::span<const double> w, double l2_sigma2) const {
  const int L = num_labels_;
  std::vector<double> scores(static_cast<std::size_t>(L));
  double obj = 0;
  for (std::size_t t = 0; t < gold_.size(); ++t) {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (std::uint32_t k = offsets_[t]; k < offsets_[t + 1]; ++k) {
      const double* row = w.data() + static_cast<std::size_t>(feature_ids_[k]) * L;
      for (int l = 0; l < L; ++l) scores[static_cast<std::size_t>(l)] += row[l];
    }
    obj += log_sum_exp(scores, false) - scores[static_cast<std::size_t>(gold_[t])];
  }
  double reg = 0;
  for (double x : w) reg += x * x;
  return obj + reg / (2.0 * l2_sigma2);
}

double TrainProblem::value_grad(std::span<const double> w, double l2_sigma2,
                                std::span<double> grad) const {
  const int L = num_labels_;
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> scores(static_cast<std::size_t>(L));
  double obj = 0;
  for (std::size_t t = 0; t < gold_.size(); ++t) {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (std::uint32_t k = offsets_[t]; k < offsets_[t + 1]; ++k) {
      const double* row = w.data() + static_cast<std::size_t>(feature_ids_[k]) * L;
      for (int l = 0; l < L; ++l) scores[static_cast<std::size_t>(l)] += row[l];
    }
    const int gold = gold_[t];
    const double gold_score = scores[static_cast<std::size_t>(gold)];
    obj += log_sum_exp(scores, true) - gold_score;
    scores[static_cast<std::size_t>(gold)] -= 1.0;  // scores now hold p - y
    for (std::uint32_t k = offsets_[t]; k < offsets_[t + 1]; ++k) {
      double* row = grad.data() + static_cast<std::size_t>(feature_ids_[k]) * L;
      for (int l = 0; l < L; ++l) row[l] += scores[static_cast<std::size_t>(l)];
    }
  }
  const double inv_sigma2 = 1.0 / l2_sigma2;
  double reg = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    reg += w[i] * w[i];
    grad[i] += w[i] * inv_sigma2;
  }
  return obj + reg * 0.5 * inv_sigma2;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct LbfgsOutcome {
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// L-BFGS with Armijo backtracking. Deterministic: fixed evaluation
// order, cold start at zero, no randomized components. The objective
// trace is monotone non-increasing because only Armijo-accepted steps
// are taken. History pairs are kept in single precision: they only
// shape the search direction (the line search guards correctness) and
// the problem dimension makes the two-loop recursion bandwidth-bound.
LbfgsOutcome lbfgs_minimize(const TrainProblem& problem, double l2_sigma2,
                            int max_iters, double tol, std::vector<double>& x) {
  constexpr int kHistory = 4;
  constexpr double kArmijo = 1e-4;

  const std::size_t n = x.size();
  LbfgsOutcome out;
  std::vector<double> g(n), g_next(n), d(n), x_next(n);
  std::vector<std::vector<float>> s_hist, y_hist;
  std::vector<double> rho_hist, sy_hist, yy_hist;

  double f = problem.value_grad(x, l2_sigma2, g);
  if (!std::isfinite(f)) fail(ErrorKind::Numeric, "non-finite training objective");
  out.trace.push_back(f);

  for (int iter = 0; iter < max_iters; ++iter) {
    // Two-loop recursion for d = -H*g.
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    std::vector<double> alpha(s_hist.size());
    for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
      const float* s = s_hist[static_cast<std::size_t>(h)].data();
      const float* y = y_hist[static_cast<std::size_t>(h)].data();
      double sd = 0;
      for (std::size_t i = 0; i < n; ++i) sd += s[i] * d[i];
      alpha[static_cast<std::size_t>(h)] = rho_hist[static_cast<std::size_t>(h)] * sd;
      const double a = alpha[static_cast<std::size_t>(h)];
      for (std::size_t i = 0; i < n; ++i) d[i] -= a * y[i];
    }
    if (!s_hist.empty()) {
      double scale = sy_hist.back() / yy_hist.back();
      for (std::size_t i = 0; i < n; ++i) d[i] *= scale;
    }
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const float* s = s_hist[h].data();
      const float* y = y_hist[h].data();
      double yd = 0;
      for (std::size_t i = 0; i < n; ++i) yd += y[i] * d[i];
      const double b = alpha[h] - rho_hist[h] * yd;
      for (std::size_t i = 0; i < n; ++i) d[i] += b * s[i];
    }

    double gd = dot(g, d);
    if (gd >= 0) {  // not a descent direction; fall back to steepest descent
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      gd = -dot(g, g);
    }
    if (gd == 0) { out.converged = true; break; }

    double step = 1.0;
    if (out.iterations == 0) {
      double gnorm = std::sqrt(-gd);
      if (gnorm > 1.0) step = 1.0 / gnorm;
    }

    // Backtracking computes the gradient alongside the objective: the
    // first step is almost always accepted and then g_next is already
    // in hand; a rejected step only wastes the scatter-add pass.
    double f_next = 0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_next[i] = x[i] + step * d[i];
      f_next = problem.value_grad(x_next, l2_sigma2, g_next);
      if (!std::isfinite(f_next))
        fail(ErrorKind::Numeric, "non-finite training objective");
      if (f_next <= f + kArmijo * step * gd) { accepted = true; break; }
      step *= 0.5;
    }
    if (!accepted) break;  // no further progress possible at double precision

    std::vector<float> s(n), y(n);
    double sy = 0, yy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double si = x_next[i] - x[i];
      double yi = g_next[i] - g[i];
      s[i] = static_cast<float>(si);
      y[i] = static_cast<float>(yi);
      sy += si * yi;
      yy += yi * yi;
    }
    if (sy > 1e-12) {
      if (static_cast<int>(s_hist.size()) == kHistory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
        sy_hist.erase(sy_hist.begin());
        yy_hist.erase(yy_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      sy_hist.push_back(sy);
      yy_hist.push_back(yy);
    }

    x.swap(x_next);
    g.swap(g_next);
    out.trace.push_back(f_next);
    ++out.iterations;

    double rel = std::abs(f - f_next) / std::max(1.0, std::abs(f));
    f = f_next;
    if (rel < tol) { out.converged = true; break; }
  }
  return out;
}

}  // namespace

TrainResult train(std::span<const Sentence* const> sentences,
                  const LabelMap& labels, FeatureView view,
                  const TrainConfig& cfg) {
  if (sentences.empty())
    fail(ErrorKind::Config, "training requires at least one sentence");
  if (!(cfg.l2_sigma2 > 0)) fail(ErrorKind::Config, "l2_sigma2 must be > 0");
  if (!(cfg.tol > 0)) fail(ErrorKind::Config, "tol must be > 0");

  TrainProblem problem(sentences, labels, view);

  TrainResult result;
  result.model.labels = labels;
  result.model.view = view;
  result.model.config = cfg;
  result.model.weights.assign(problem.dim(), 0.0);

  LbfgsOutcome opt = lbfgs_minimize(problem, cfg.l2_sigma2, cfg.max_iters,
                                    cfg.tol, result.model.weights);
  result.model.features = problem.features();
  result.objective_trace = std::move(opt.trace);
  result.iterations = opt.iterations;
  result.converged = opt.converged;
  return result;
}

TrainResult train(const std::vector<Sentence>& sentences, FeatureView view,
                  const TrainConfig& cfg) {
  std::vector<const Sentence*> ptrs;
  ptrs.reserve(sentences.size());
  for (const auto& s : sentences) ptrs.push_back(&s);
  return train(ptrs, LabelMap::from_sentences(ptrs), view, cfg);
}

Prediction predict(const Model& model, const Sentence& sentence) {
  const int L = model.labels.size();
  const int n = sentence.length();
  Prediction pred;
  pred.num_labels = L;
  pred.label_ids.resize(static_cast<std::size_t>(n));
  pred.posteriors.resize(static_cast<std::size_t>(n) * L);

  std::vector<BioLabel> tags(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    std::span<double> scores(pred.posteriors.data() + static_cast<std::size_t>(t) * L,
                             static_cast<std::size_t>(L));
    std::fill(scores.begin(), scores.end(), 0.0);
    FeatureVector fv = extract(model.view, sentence, t, model.features);
    for (std::uint32_t f : fv) {
      const double* row = model.weights.data() + static_cast<std::size_t>(f) * L;
      for (int l = 0; l < L; ++l) scores[static_cast<std::size_t>(l)] += row[l];
    }
    maxent_detail::softmax(scores);
    int best = 0;
    for (int l = 1; l < L; ++l)
      if (scores[static_cast<std::size_t>(l)] > scores[static_cast<std::size_t>(best)])
        best = l;
    pred.label_ids[static_cast<std::size_t>(t)] = best;
    tags[static_cast<std::size_t>(t)] = model.labels.label(best);
  }
  pred.mentions = decode_bio(tags);
  pred.confidence = sentence_confidence(pred);
  return pred;
}

double sentence_confidence(const Prediction& pred) {
  const int n = pred.length();
  if (n == 0) return 1.0;
  double log_sum = 0;
  for (int t = 0; t < n; ++t)
    log_sum += std::log(pred.posterior(t, pred.label_ids[static_cast<std::size_t>(t)]));
  return std::exp(log_sum / n);
}

namespace {

constexpr const char* kModelMagic = "almd-model";
constexpr int kModelVersion = 1;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void Model::save(std::ostream& out) const {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "inventory " << kFeatureInventoryVersion << '\n';
  out << "view " << to_string(view) << '\n';
  out << "l2_sigma2 " << fmt_double(config.l2_sigma2) << '\n';
  out << "max_iters " << config.max_iters << '\n';
  out << "tol " << fmt_double(config.tol) << '\n';
  out << "seed " << config.seed << '\n';
  out << "labels " << labels.size() << '\n';
  for (int i = 0; i < labels.size(); ++i) out << labels.label(i).str() << '\n';
  out << "features " << features.size() << '\n';
  for (std::uint32_t i = 0; i < features.size(); ++i)
    out << features.name(i) << '\n';
  out << "weights " << weights.size() << '\n';
  for (std::size_t f = 0; f < features.size(); ++f) {
    for (int l = 0; l < labels.size(); ++l) {
      if (l) out << ' ';
      out << fmt_double(weights[f * static_cast<std::size_t>(labels.size()) + static_cast<std::size_t>(l)]);
    }
    out << '\n';
  }
}

void Model::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write model file: " + path);
  save(out);
  out.flush();
  if (!out) fail(ErrorKind::Io, "model write failed: " + path);
}

Model Model::load(std::istream& in, const std::string& name) {
  auto bad = [&](const std::string& why) -> void {
    fail(ErrorKind::Parse, name + ": " + why);
  };
  std::string word;
  int version = -1;
  in >> word >> version;
  if (!in || word != kModelMagic) bad("not a model file");
  if (version != kModelVersion)
    bad("unsupported model version " + std::to_string(version));
  std::string inventory;
  in >> word >> inventory;
  if (!in || word != "inventory") bad("missing inventory line");
  if (inventory != kFeatureInventoryVersion)
    bad("feature inventory mismatch: model has " + inventory + ", this build uses " +
        kFeatureInventoryVersion);

  Model model;
  std::string view_str;
  in >> word >> view_str;
  if (!in || word != "view") bad("missing view line");
  auto view = parse_view(view_str);
  if (!view) bad("unknown view " + view_str);
  model.view = *view;
  in >> word >> model.config.l2_sigma2;
  if (!in || word != "l2_sigma2") bad("missing l2_sigma2");
  in >> word >> model.config.max_iters;
  if (!in || word != "max_iters") bad("missing max_iters");
  in >> word >> model.config.tol;
  if (!in || word != "tol") bad("missing tol");
  in >> word >> model.config.seed;
  if (!in || word != "seed") bad("missing seed");

  std::size_t num_labels = 0;
  in >> word >> num_labels;
  if (!in || word != "labels") bad("missing labels section");
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  std::vector<std::string> cats;
  std::vector<MentionLevel> lvls;
  std::vector<std::string> label_strs(num_labels);
  for (auto& ls : label_strs) {
    if (!std::getline(in, ls)) bad("truncated label list");
    auto parsed = BioLabel::parse(ls);
    if (!parsed) bad("bad label " + ls);
    if (parsed->tag != BioLabel::Tag::O) {
      cats.push_back(parsed->category);
      lvls.push_back(parsed->level);
    }
  }
  model.labels = LabelMap::build(cats, lvls);
  if (static_cast<std::size_t>(model.labels.size()) != num_labels)
    bad("label list is not a full {O} + {B,I} x categories x levels vocabulary");
  for (std::size_t i = 0; i < num_labels; ++i) {
    if (model.labels.label(static_cast<int>(i)).str() != label_strs[i])
      bad("label order mismatch at id " + std::to_string(i));
  }

  std::size_t num_features = 0;
  in >> word >> num_features;
  if (!in || word != "features") bad("missing features section");
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  std::string feature_name;
  for (std::size_t i = 0; i < num_features; ++i) {
    if (!std::getline(in, feature_name)) bad("truncated feature list");
    if (model.features.intern(feature_name) != static_cast<std::uint32_t>(i))
      bad("duplicate feature name " + feature_name);
  }
  model.features.freeze();

  std::size_t num_weights = 0;
  in >> word >> num_weights;
  if (!in || word != "weights") bad("missing weights section");
  if (num_weights != num_features * num_labels) bad("weight count mismatch");
  model.weights.resize(num_weights);
  for (auto& w : model.weights) {
    in >> w;
    if (!in) bad("truncated weights");
    if (!std::isfinite(w)) bad("non-finite weight");
  }
  return model;
}

Model Model::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open model file: " + path);
  return load(in, path);
}

}  // namespace almd
