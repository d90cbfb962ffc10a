#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace almd {

enum class MentionLevel : std::uint8_t { Nam = 0, Nom = 1, Pro = 2 };

inline constexpr int kNumLevels = 3;

const char* to_string(MentionLevel level);
std::optional<MentionLevel> parse_level(std::string_view s);

// A contiguous token span labeled with an entity category and a level
// (named / nominal / pronominal). Spans are [start, end).
struct Mention {
  int start = 0;
  int end = 0;
  std::string category;
  MentionLevel level = MentionLevel::Nam;

  auto operator<=>(const Mention&) const = default;
};

struct Sentence {
  int id = 0;
  int doc_id = 0;
  std::vector<std::string> tokens;
  std::vector<Mention> mentions;  // sorted by start, disjoint

  int length() const { return static_cast<int>(tokens.size()); }

  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::vector<std::string> categories;  // sorted, distinct

  std::uint64_t word_count() const;
  std::uint64_t mention_count() const;
  int document_count() const;

  bool operator==(const Corpus&) const = default;
};

// Per-token tag: O, or B/I with category and level ("B-PER.NAM").
struct BioLabel {
  enum class Tag : std::uint8_t { O = 0, B = 1, I = 2 };

  Tag tag = Tag::O;
  std::string category;
  MentionLevel level = MentionLevel::Nam;

  std::string str() const;
  static std::optional<BioLabel> parse(std::string_view s);

  bool operator==(const BioLabel&) const = default;
};

// Throws ErrorKind::Structure if a mention is out of range for `length`,
// empty, or overlaps another. `mentions` need not be sorted.
void validate_mentions(const std::vector<Mention>& mentions, int length);

std::vector<BioLabel> encode_bio(const std::vector<Mention>& mentions,
                                 int length);

// Total: inconsistent sequences are repaired, never rejected. An I tag
// that cannot continue the previous token's mention opens a new one.
std::vector<Mention> decode_bio(const std::vector<BioLabel>& labels);

// Removes pronominal mentions and recomputes the category list, the
// same filtering read_corpus applies at load time by default.
void drop_pronominal(Corpus& corpus);

// Corpus file format: one `surface<TAB>tag` line per token, blank line
// ends a sentence, a line consisting of `-DOCSTART-` ends a document.
Corpus read_corpus(std::istream& in, const std::string& name,
                   bool keep_pronominal = false);
Corpus read_corpus(const std::string& path, bool keep_pronominal = false);
void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::string& path);

// Parameters for the synthetic corpus generator. Mentions are marked by
// category-specific cue tokens (capitalized for named, lowercase for
// nominal), optionally preceded by a category trigger token; a fraction
// of cue tokens also appears outside mentions as label noise.
struct SynthSpec {
  int sentences = 3000;
  std::vector<std::string> categories = {"PER", "ORG", "LOC", "FAC", "VEH"};
  int min_sentence_len = 6;
  int max_sentence_len = 24;
  int sentences_per_doc = 30;
  double mention_density = 0.08;  // expected mentions per word
  int max_mention_len = 3;
  int cue_vocab = 40;    // cue tokens per category and level
  int filler_vocab = 500;
  double cue_noise = 0.05;    // P(cue token at a non-mention position)
  double trigger_prob = 0.5;  // P(trigger token before a mention)
  double level_nam = 0.45;
  double level_nom = 0.45;
  double level_pro = 0.10;
};

Corpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

// Document-granular split: dev takes documents, in seeded-shuffle order,
// until their cumulative word share first reaches dev_fraction.
// Returns (pool, dev). Sentence ids and doc ids are preserved.
std::pair<Corpus, Corpus> split_pool_dev(const Corpus& corpus,
                                         double dev_fraction,
                                         std::uint64_t seed);

}  // namespace almd
