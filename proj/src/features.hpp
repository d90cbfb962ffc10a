#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace almd {

// Identifies the token-classification feature inventory. Embedded in
// saved models; load rejects a model built with a different inventory.
inline constexpr const char* kFeatureInventoryVersion = "almd-fv1";

enum class FeatureView : std::uint8_t { Inside = 0, Outside = 1, Full = 2 };

const char* to_string(FeatureView view);
std::optional<FeatureView> parse_view(std::string_view s);

// Sorted, duplicate-free feature ids; all features are binary indicators.
using FeatureVector = std::vector<std::uint32_t>;

// Bidirectional feature-name <-> dense-id map. Ids are assigned in
// first-seen order. Once frozen, unseen names map to npos instead of
// growing the space, so a trained model's weights stay aligned.
class FeatureInterner {
 public:
  static constexpr std::uint32_t npos = 0xffffffffu;

  std::uint32_t intern(std::string_view name);
  std::uint32_t lookup(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

// Extracts the view's features for token i. The inside view sees only
// the current token (surface, lowercase, prefixes/suffixes 1-4, shape,
// bias); the outside view sees only neighbors at offsets -2..+2 plus
// the (-1,+1) lowercase bigram and bias. Full is their union; the views
// stay disjoint via the in:/out: name prefixes.
FeatureVector extract(FeatureView view, const Sentence& sentence, int i,
                      FeatureInterner& interner);

// Frozen-lookup variant; names absent from the interner are dropped.
// Pure, safe for concurrent use.
FeatureVector extract(FeatureView view, const Sentence& sentence, int i,
                      const FeatureInterner& interner);

}  // namespace almd
