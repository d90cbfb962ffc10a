#include "features.hpp"

#include <algorithm>
#include <cctype>

namespace almd {

const char* to_string(FeatureView view) {
  switch (view) {
    case FeatureView::Inside: return "inside";
    case FeatureView::Outside: return "outside";
    case FeatureView::Full: return "full";
  }
  return "?";
}

std::optional<FeatureView> parse_view(std::string_view s) {
  if (s == "inside") return FeatureView::Inside;
  if (s == "outside") return FeatureView::Outside;
  if (s == "full") return FeatureView::Full;
  return std::nullopt;
}

std::uint32_t FeatureInterner::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  if (frozen_) return npos;
  std::uint32_t id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::uint32_t FeatureInterner::lookup(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  return it == ids_.end() ? npos : it->second;
}

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const char* shape_class(const std::string& s) {
  bool any_digit = false, all_upper = true, all_lower = true, any_alpha = false;
  for (unsigned char c : s) {
    if (std::isdigit(c)) any_digit = true;
    if (std::isalpha(c)) {
      any_alpha = true;
      if (!std::isupper(c)) all_upper = false;
      if (!std::islower(c)) all_lower = false;
    } else {
      all_upper = all_lower = false;
    }
  }
  if (any_digit) return "digit";
  if (any_alpha && all_upper) return "allcaps";
  if (std::isupper(static_cast<unsigned char>(s[0]))) return "cap";
  if (any_alpha && all_lower) return "lower";
  return "other";
}

// Collects names through either a mutable (interning) or const (lookup)
// interner, then sorts and dedups the resulting ids.
template <typename Interner>
class Collector {
 public:
  explicit Collector(Interner& interner) : interner_(interner) {}

  void add(const std::string& name) {
    std::uint32_t id;
    if constexpr (std::is_const_v<Interner>)
      id = interner_.lookup(name);
    else
      id = interner_.intern(name);
    if (id != FeatureInterner::npos) ids_.push_back(id);
  }

  FeatureVector take() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    return std::move(ids_);
  }

 private:
  Interner& interner_;
  FeatureVector ids_;
};

template <typename Collector>
void inside_features(const Sentence& s, int i, Collector& out) {
  const std::string& w = s.tokens[static_cast<std::size_t>(i)];
  const std::string lc = lower(w);
  out.add("in:bias");
  out.add("in:w=" + w);
  out.add("in:lc=" + lc);
  const int n = static_cast<int>(w.size());
  for (int k = 1; k <= 4 && k <= n; ++k) {
    out.add("in:pre" + std::to_string(k) + "=" + w.substr(0, static_cast<std::size_t>(k)));
    out.add("in:suf" + std::to_string(k) + "=" + w.substr(static_cast<std::size_t>(n - k)));
  }
  out.add(std::string("in:shape=") + shape_class(w));
}

template <typename Collector>
void outside_features(const Sentence& s, int i, Collector& out) {
  const int len = s.length();
  out.add("out:bias");
  for (int d : {-2, -1, 1, 2}) {
    const int j = i + d;
    const std::string off = (d > 0 ? "+" : "") + std::to_string(d);
    if (j < 0 || j >= len) {
      out.add("out:bnd[" + off + "]");
      continue;
    }
    const std::string& w = s.tokens[static_cast<std::size_t>(j)];
    out.add("out:w[" + off + "]=" + w);
    out.add("out:lc[" + off + "]=" + lower(w));
  }
  // (-1,+1) bigram, only when at least one neighbor exists.
  if (i - 1 >= 0 || i + 1 < len) {
    std::string left =
        i - 1 >= 0 ? lower(s.tokens[static_cast<std::size_t>(i - 1)]) : "<s>";
    std::string right =
        i + 1 < len ? lower(s.tokens[static_cast<std::size_t>(i + 1)]) : "</s>";
    out.add("out:big=" + left + "_" + right);
  }
}

template <typename Interner>
FeatureVector extract_impl(FeatureView view, const Sentence& s, int i,
                           Interner& interner) {
  if (i < 0 || i >= s.length())
    fail(ErrorKind::Structure, "token index " + std::to_string(i) +
                                   " out of range for sentence of length " +
                                   std::to_string(s.length()));
  Collector<Interner> out(interner);
  if (view == FeatureView::Inside || view == FeatureView::Full)
    inside_features(s, i, out);
  if (view == FeatureView::Outside || view == FeatureView::Full)
    outside_features(s, i, out);
  return out.take();
}

}  // namespace

FeatureVector extract(FeatureView view, const Sentence& sentence, int i,
                      FeatureInterner& interner) {
  return extract_impl(view, sentence, i, interner);
}

FeatureVector extract(FeatureView view, const Sentence& sentence, int i,
                      const FeatureInterner& interner) {
  return extract_impl(view, sentence, i, interner);
}

}  // namespace almd
