#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "rng.hpp"

namespace almd {

const char* to_string(MentionLevel level) {
  switch (level) {
    case MentionLevel::Nam: return "NAM";
    case MentionLevel::Nom: return "NOM";
    case MentionLevel::Pro: return "PRO";
  }
  return "?";
}

std::optional<MentionLevel> parse_level(std::string_view s) {
  if (s == "NAM") return MentionLevel::Nam;
  if (s == "NOM") return MentionLevel::Nom;
  if (s == "PRO") return MentionLevel::Pro;
  return std::nullopt;
}

std::uint64_t Corpus::word_count() const {
  std::uint64_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

std::uint64_t Corpus::mention_count() const {
  std::uint64_t n = 0;
  for (const auto& s : sentences) n += s.mentions.size();
  return n;
}

int Corpus::document_count() const {
  std::set<int> docs;
  for (const auto& s : sentences) docs.insert(s.doc_id);
  return static_cast<int>(docs.size());
}

std::string BioLabel::str() const {
  if (tag == Tag::O) return "O";
  std::string out(tag == Tag::B ? "B-" : "I-");
  out += category;
  out += '.';
  out += to_string(level);
  return out;
}

std::optional<BioLabel> BioLabel::parse(std::string_view s) {
  if (s == "O") return BioLabel{};
  if (s.size() < 2) return std::nullopt;
  BioLabel::Tag tag;
  if (s.substr(0, 2) == "B-") {
    tag = Tag::B;
  } else if (s.substr(0, 2) == "I-") {
    tag = Tag::I;
  } else {
    return std::nullopt;
  }
  std::string_view rest = s.substr(2);
  auto dot = rest.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return std::nullopt;
  auto level = parse_level(rest.substr(dot + 1));
  if (!level) return std::nullopt;
  return BioLabel{tag, std::string(rest.substr(0, dot)), *level};
}

void validate_mentions(const std::vector<Mention>& mentions, int length) {
  std::vector<Mention> sorted = mentions;
  std::sort(sorted.begin(), sorted.end());
  int prev_end = 0;
  for (const auto& m : sorted) {
    if (m.start < 0 || m.start >= m.end || m.end > length)
      fail(ErrorKind::Structure,
           "mention [" + std::to_string(m.start) + "," +
               std::to_string(m.end) + ") out of range for length " +
               std::to_string(length));
    if (m.start < prev_end)
      fail(ErrorKind::Structure, "overlapping mentions at token " +
                                     std::to_string(m.start));
    prev_end = m.end;
  }
}

std::vector<BioLabel> encode_bio(const std::vector<Mention>& mentions,
                                 int length) {
  validate_mentions(mentions, length);
  std::vector<BioLabel> labels(static_cast<std::size_t>(length));
  for (const auto& m : mentions) {
    labels[m.start] = BioLabel{BioLabel::Tag::B, m.category, m.level};
    for (int i = m.start + 1; i < m.end; ++i)
      labels[i] = BioLabel{BioLabel::Tag::I, m.category, m.level};
  }
  return labels;
}

std::vector<Mention> decode_bio(const std::vector<BioLabel>& labels) {
  std::vector<Mention> mentions;
  int open_start = -1;
  std::string open_cat;
  MentionLevel open_level = MentionLevel::Nam;

  auto close = [&](int end) {
    if (open_start >= 0)
      mentions.push_back(Mention{open_start, end, open_cat, open_level});
    open_start = -1;
  };

  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    const BioLabel& l = labels[i];
    switch (l.tag) {
      case BioLabel::Tag::O:
        close(i);
        break;
      case BioLabel::Tag::B:
        close(i);
        open_start = i;
        open_cat = l.category;
        open_level = l.level;
        break;
      case BioLabel::Tag::I:
        if (open_start >= 0 && open_cat == l.category &&
            open_level == l.level) {
          break;  // continues the open mention
        }
        close(i);
        open_start = i;
        open_cat = l.category;
        open_level = l.level;
        break;
    }
  }
  close(static_cast<int>(labels.size()));
  return mentions;
}

namespace {

constexpr const char* kDocMarker = "-DOCSTART-";

std::vector<std::string> sorted_categories(const std::vector<Sentence>& sents) {
  std::set<std::string> cats;
  for (const auto& s : sents)
    for (const auto& m : s.mentions) cats.insert(m.category);
  return {cats.begin(), cats.end()};
}

}  // namespace

void drop_pronominal(Corpus& corpus) {
  for (auto& s : corpus.sentences)
    std::erase_if(s.mentions, [](const Mention& m) {
      return m.level == MentionLevel::Pro;
    });
  corpus.categories = sorted_categories(corpus.sentences);
}

Corpus read_corpus(std::istream& in, const std::string& name,
                   bool keep_pronominal) {
  Corpus corpus;
  std::vector<std::string> tokens;
  std::vector<BioLabel> tags;
  int doc = 0;
  int next_id = 0;
  int sentences_in_doc = 0;
  int line_no = 0;

  auto where = [&] { return name + ":" + std::to_string(line_no); };

  auto finish_sentence = [&] {
    if (tokens.empty()) return;
    Sentence s;
    s.id = next_id++;
    s.doc_id = doc;
    s.tokens = std::move(tokens);
    s.mentions = decode_bio(tags);
    if (!keep_pronominal) {
      std::erase_if(s.mentions, [](const Mention& m) {
        return m.level == MentionLevel::Pro;
      });
    }
    corpus.sentences.push_back(std::move(s));
    tokens.clear();
    tags.clear();
    ++sentences_in_doc;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish_sentence();
      continue;
    }
    if (line == kDocMarker) {
      finish_sentence();
      if (sentences_in_doc == 0)
        fail(ErrorKind::Parse, where() + ": dangling document marker");
      ++doc;
      sentences_in_doc = 0;
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      fail(ErrorKind::Parse,
           where() + ": expected `surface<TAB>tag`, got `" + line + "`");
    std::string surface = line.substr(0, tab);
    std::string tag_str = line.substr(tab + 1);
    auto tag = BioLabel::parse(tag_str);
    if (!tag)
      fail(ErrorKind::Parse, where() + ": bad tag `" + tag_str + "`");
    tokens.push_back(std::move(surface));
    tags.push_back(std::move(*tag));
  }
  finish_sentence();
  if (doc > 0 && sentences_in_doc == 0)
    fail(ErrorKind::Parse, where() + ": dangling document marker at end");

  corpus.categories = sorted_categories(corpus.sentences);
  return corpus;
}

Corpus read_corpus(const std::string& path, bool keep_pronominal) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open corpus file: " + path);
  return read_corpus(in, path, keep_pronominal);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  int prev_doc = corpus.sentences.empty() ? 0 : corpus.sentences[0].doc_id;
  for (const auto& s : corpus.sentences) {
    if (s.doc_id != prev_doc) {
      out << kDocMarker << '\n';
      prev_doc = s.doc_id;
    }
    std::vector<BioLabel> tags = encode_bio(s.mentions, s.length());
    for (std::size_t i = 0; i < s.tokens.size(); ++i)
      out << s.tokens[i] << '\t' << tags[i].str() << '\n';
    out << '\n';
  }
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write corpus file: " + path);
  write_corpus(corpus, out);
  out.flush();
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

namespace {

// Letters-only tokens so that token shape stays informative.
std::string letters(std::uint64_t value, int width) {
  std::string s(static_cast<std::size_t>(width), 'a');
  for (int i = width - 1; i >= 0; --i) {
    s[i] = static_cast<char>('a' + value % 26);
    value /= 26;
  }
  return s;
}

// Scatters sequential indices across the 26^width token space. The
// multiplier is odd and not divisible by 13, hence coprime with 26^w,
// so distinct indices map to distinct tokens; the scattering keeps cue
// tokens from sharing informative prefixes, which would let a model
// generalize across the cue vocabulary instead of having to see each
// cue labeled.
std::string scattered_letters(std::uint64_t index, int width) {
  std::uint64_t space = 1;
  for (int i = 0; i < width; ++i) space *= 26;
  return letters((index * 2654435761ull) % space, width);
}

const std::vector<std::string> kPronouns = {"he",   "she",  "it",   "they",
                                            "them", "who",  "this", "that"};

}  // namespace

Corpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.sentences < 0)
    fail(ErrorKind::Config, "synthetic spec: negative sentence count");
  if (spec.categories.empty())
    fail(ErrorKind::Config, "synthetic spec: no categories");
  if (spec.min_sentence_len < 1 || spec.max_sentence_len < spec.min_sentence_len)
    fail(ErrorKind::Config, "synthetic spec: bad sentence length range");
  if (spec.sentences_per_doc < 1)
    fail(ErrorKind::Config, "synthetic spec: sentences_per_doc must be >= 1");
  if (spec.mention_density < 0)
    fail(ErrorKind::Config, "synthetic spec: negative mention density");
  if (spec.max_mention_len < 1)
    fail(ErrorKind::Config, "synthetic spec: max_mention_len must be >= 1");
  if (spec.cue_vocab < 1 || spec.filler_vocab < 1)
    fail(ErrorKind::Config, "synthetic spec: vocabulary sizes must be >= 1");
  if (spec.cue_noise < 0 || spec.cue_noise > 1 || spec.trigger_prob < 0 ||
      spec.trigger_prob > 1)
    fail(ErrorKind::Config, "synthetic spec: probabilities must be in [0,1]");
  double level_sum = spec.level_nam + spec.level_nom + spec.level_pro;
  if (spec.level_nam < 0 || spec.level_nom < 0 || spec.level_pro < 0 ||
      level_sum <= 0)
    fail(ErrorKind::Config, "synthetic spec: bad level mix");
  for (const auto& cat : spec.categories) {
    if (cat.empty()) fail(ErrorKind::Config, "synthetic spec: empty category");
    for (char c : cat)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        fail(ErrorKind::Config,
             "synthetic spec: category names must be alphanumeric: " + cat);
  }

  const int num_cats = static_cast<int>(spec.categories.size());

  auto cue_token = [&](int cat, MentionLevel level, int idx) {
    if (level == MentionLevel::Pro)
      return kPronouns[static_cast<std::size_t>(idx) % kPronouns.size()];
    const int level01 = level == MentionLevel::Nam ? 0 : 1;
    const std::uint64_t global =
        (static_cast<std::uint64_t>(cat) * 2 + level01) *
            static_cast<std::uint64_t>(spec.cue_vocab) +
        static_cast<std::uint64_t>(idx);
    std::string t = scattered_letters(global, 5);
    if (level == MentionLevel::Nam)
      t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    return t;
  };
  auto trigger_token = [&](int cat, int idx) {
    return "t" + scattered_letters(static_cast<std::uint64_t>(cat) * 4 +
                                       static_cast<std::uint64_t>(idx),
                                   3);
  };

  const double p_nam = spec.level_nam / level_sum;
  const double p_nom = spec.level_nom / level_sum;

  Rng rng(seed);
  Corpus corpus;
  corpus.sentences.reserve(static_cast<std::size_t>(spec.sentences));

  for (int si = 0; si < spec.sentences; ++si) {
    Sentence s;
    s.id = si;
    s.doc_id = si / spec.sentences_per_doc;
    const int len =
        spec.min_sentence_len +
        static_cast<int>(rng.below(static_cast<std::uint64_t>(
            spec.max_sentence_len - spec.min_sentence_len + 1)));
    s.tokens.resize(static_cast<std::size_t>(len));
    for (auto& t : s.tokens)
      t = "f" + letters(rng.below(static_cast<std::uint64_t>(spec.filler_vocab)), 3);

    // Expected mention count is density * len.
    double target = spec.mention_density * len;
    int want = static_cast<int>(target);
    if (rng.real01() < target - want) ++want;

    std::vector<char> taken(static_cast<std::size_t>(len), 0);
    for (int mi = 0; mi < want; ++mi) {
      double u = rng.real01();
      MentionLevel level = u < p_nam               ? MentionLevel::Nam
                           : u < p_nam + p_nom     ? MentionLevel::Nom
                                                   : MentionLevel::Pro;
      int cat = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_cats)));
      int max_len = level == MentionLevel::Pro
                        ? 1
                        : std::min(spec.max_mention_len, len);
      int mlen = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
      bool placed = false;
      for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
        int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(len - mlen + 1)));
        bool free = true;
        for (int i = start; i < start + mlen; ++i)
          if (taken[i]) { free = false; break; }
        if (!free) continue;
        for (int i = start; i < start + mlen; ++i) {
          taken[i] = 1;
          s.tokens[i] = cue_token(
              cat, level, static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.cue_vocab))));
        }
        s.mentions.push_back(
            Mention{start, start + mlen, spec.categories[cat], level});
        placed = true;
      }
    }
    std::sort(s.mentions.begin(), s.mentions.end());

    // Stray cues outside mentions keep the task from being trivially separable.
    for (int i = 0; i < len; ++i) {
      if (taken[i]) continue;
      if (rng.real01() < spec.cue_noise) {
        int cat = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_cats)));
        MentionLevel level =
            rng.below(2) == 0 ? MentionLevel::Nam : MentionLevel::Nom;
        s.tokens[i] = cue_token(
            cat, level, static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.cue_vocab))));
      }
    }

    // Context signal for the outside view: a trigger token before a mention.
    for (const auto& m : s.mentions) {
      if (rng.real01() >= spec.trigger_prob) continue;
      int pos = m.start - 1;
      if (pos < 0 || taken[pos]) continue;
      int cat = 0;
      for (int c = 0; c < num_cats; ++c)
        if (spec.categories[c] == m.category) { cat = c; break; }
      s.tokens[pos] = trigger_token(cat, static_cast<int>(rng.below(4)));
    }

    corpus.sentences.push_back(std::move(s));
  }

  corpus.categories = sorted_categories(corpus.sentences);
  return corpus;
}

std::pair<Corpus, Corpus> split_pool_dev(const Corpus& corpus,
                                         double dev_fraction,
                                         std::uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
    fail(ErrorKind::Config, "dev_fraction must be in (0,1)");

  std::vector<int> doc_ids;
  std::map<int, std::uint64_t> doc_words;
  for (const auto& s : corpus.sentences) {
    auto [it, inserted] = doc_words.try_emplace(s.doc_id, 0);
    if (inserted) doc_ids.push_back(s.doc_id);
    it->second += s.tokens.size();
  }
  if (doc_ids.size() < 2)
    fail(ErrorKind::Config,
         "pool/dev split needs at least two documents, got " +
             std::to_string(doc_ids.size()));

  Rng rng(seed);
  rng.shuffle(doc_ids);

  const double total = static_cast<double>(corpus.word_count());
  std::set<int> dev_docs;
  std::uint64_t cum = 0;
  for (int d : doc_ids) {
    dev_docs.insert(d);
    cum += doc_words[d];
    if (static_cast<double>(cum) / total >= dev_fraction) break;
  }
  if (dev_docs.size() == doc_words.size())
    fail(ErrorKind::Config, "dev_fraction consumes every document");

  Corpus pool, dev;
  pool.categories = corpus.categories;
  dev.categories = corpus.categories;
  for (const auto& s : corpus.sentences) {
    if (dev_docs.count(s.doc_id))
      dev.sentences.push_back(s);
    else
      pool.sentences.push_back(s);
  }
  return {std::move(pool), std::move(dev)};
}

}  // namespace almd
