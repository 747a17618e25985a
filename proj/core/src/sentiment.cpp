// Copyright 2026 The Counterbot Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "counterbot/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <fmt/format.h>

#include "counterbot/data.hpp"
#include "counterbot/error.hpp"

namespace counterbot {

namespace {

constexpr double kBoost = SentimentAnalyzer::kBoosterIncrement;
constexpr double kDamp = -SentimentAnalyzer::kBoosterIncrement;

const std::unordered_map<std::string, double>& booster_dict() {
  static const std::unordered_map<std::string, double> kDict = {
      {"absolutely", kBoost}, {"amazingly", kBoost}, {"awfully", kBoost}, {"completely", kBoost},
      {"considerable", kBoost}, {"considerably", kBoost}, {"decidedly", kBoost}, {"deeply", kBoost},
      {"effing", kBoost}, {"enormous", kBoost}, {"enormously", kBoost}, {"entirely", kBoost},
      {"especially", kBoost}, {"exceptional", kBoost}, {"exceptionally", kBoost}, {"extreme", kBoost},
      {"extremely", kBoost}, {"fabulously", kBoost}, {"flipping", kBoost}, {"flippin", kBoost},
      {"frackin", kBoost}, {"fracking", kBoost}, {"fricking", kBoost}, {"frickin", kBoost},
      {"frigging", kBoost}, {"friggin", kBoost}, {"fully", kBoost}, {"fuckin", kBoost},
      {"fucking", kBoost}, {"fuggin", kBoost}, {"fugging", kBoost}, {"greatly", kBoost},
      {"hella", kBoost}, {"highly", kBoost}, {"hugely", kBoost}, {"incredible", kBoost},
      {"incredibly", kBoost}, {"intensely", kBoost}, {"major", kBoost}, {"majorly", kBoost},
      {"more", kBoost}, {"most", kBoost}, {"particularly", kBoost}, {"purely", kBoost},
      {"quite", kBoost}, {"really", kBoost}, {"remarkably", kBoost}, {"so", kBoost},
      {"substantially", kBoost}, {"thoroughly", kBoost}, {"total", kBoost}, {"totally", kBoost},
      {"tremendous", kBoost}, {"tremendously", kBoost}, {"uber", kBoost}, {"unbelievably", kBoost},
      {"unusually", kBoost}, {"utter", kBoost}, {"utterly", kBoost}, {"very", kBoost},
      {"almost", kDamp}, {"barely", kDamp}, {"hardly", kDamp}, {"just enough", kDamp},
      {"kind of", kDamp}, {"kinda", kDamp}, {"kindof", kDamp}, {"kind-of", kDamp},
      {"less", kDamp}, {"little", kDamp}, {"marginal", kDamp}, {"marginally", kDamp},
      {"occasional", kDamp}, {"occasionally", kDamp}, {"partly", kDamp}, {"scarce", kDamp},
      {"scarcely", kDamp}, {"slight", kDamp}, {"slightly", kDamp}, {"somewhat", kDamp},
      {"sort of", kDamp}, {"sorta", kDamp}, {"sortof", kDamp}, {"sort-of", kDamp}};
  return kDict;
}

const std::unordered_set<std::string>& negate_words() {
  static const std::unordered_set<std::string> kWords = {
      "aint",     "arent",    "cannot",   "cant",     "couldnt",  "darent",   "didnt",   "doesnt",
      "ain't",    "aren't",   "can't",    "couldn't", "daren't",  "didn't",   "doesn't", "dont",
      "hadnt",    "hasnt",    "havent",   "isnt",     "mightnt",  "mustnt",   "neither", "don't",
      "hadn't",   "hasn't",   "haven't",  "isn't",    "mightn't", "mustn't",  "neednt",  "needn't",
      "never",    "none",     "nope",     "nor",      "not",      "nothing",  "nowhere", "oughtnt",
      "shant",    "shouldnt", "uhuh",     "wasnt",    "werent",   "oughtn't", "shan't",  "shouldn't",
      "uh-uh",    "wasn't",   "weren't",  "without",  "wont",     "wouldnt",  "won't",   "wouldn't",
      "rarely",   "seldom",   "despite"};
  return kWords;
}

const std::unordered_map<std::string, double>& special_cases() {
  static const std::unordered_map<std::string, double> kCases = {
      {"the shit", 3},        {"the bomb", 3},       {"bad ass", 1.5},   {"badass", 1.5},
      {"bus stop", 0.0},      {"yeah right", -2},    {"kiss of death", -1.5},
      {"to die for", 3},      {"beating heart", 3.5}};
  return kCases;
}

bool is_split_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || (c >= 0x1c && c <= 0x1f);
}

bool is_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126);
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i += utf8_length(static_cast<unsigned char>(s[i]))) ++n;
  return n;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// str.isupper() restricted to ASCII letters.
bool is_upper(std::string_view s) {
  bool cased = false;
  for (char c : s) {
    if (c >= 'a' && c <= 'z') return false;
    if (c >= 'A' && c <= 'Z') cased = true;
  }
  return cased;
}

// Trims ASCII punctuation from both ends unless that leaves <= 2 characters
// (likely an emoticon such as ":)").
std::string strip_punc_if_word(const std::string& token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && is_punct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && is_punct(static_cast<unsigned char>(token[e - 1]))) --e;
  std::string_view stripped(token.data() + b, e - b);
  if (codepoint_count(stripped) <= 2) return token;
  return std::string(stripped);
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_split_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_split_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) words.push_back(strip_punc_if_word(std::string(text.substr(i, j - i))));
    i = j;
  }
  return words;
}

bool allcap_differential(const std::vector<std::string>& words) {
  std::size_t allcaps = 0;
  for (const auto& w : words) {
    if (is_upper(w)) ++allcaps;
  }
  const std::size_t diff = words.size() - allcaps;
  return diff > 0 && diff < words.size();
}

bool negated(const std::string& lowered_word) {
  return negate_words().contains(lowered_word) || lowered_word.find("n't") != std::string::npos;
}

double scalar_inc_dec(const std::string& word, double valence, bool cap_diff) {
  const auto& boosters = booster_dict();
  auto it = boosters.find(lower(word));
  if (it == boosters.end()) return 0.0;
  double scalar = it->second;
  if (valence < 0) scalar *= -1;
  if (is_upper(word) && cap_diff) {
    scalar += valence > 0 ? SentimentAnalyzer::kCapsIncrement : -SentimentAnalyzer::kCapsIncrement;
  }
  return scalar;
}

double negation_check(double valence, const std::vector<std::string>& lw, int start_i, std::size_t i) {
  auto is = [&](std::size_t back, std::string_view w) { return lw[i - back] == w; };
  if (start_i == 0) {
    if (negated(lw[i - 1])) valence *= SentimentAnalyzer::kNegationScalar;
  } else if (start_i == 1) {
    if (is(2, "never") && (is(1, "so") || is(1, "this"))) {
      valence *= 1.25;
    } else if (is(2, "without") && is(1, "doubt")) {
      // unchanged
    } else if (negated(lw[i - 2])) {
      valence *= SentimentAnalyzer::kNegationScalar;
    }
  } else {
    if ((is(3, "never") && (is(2, "so") || is(2, "this"))) || (is(1, "so") || is(1, "this"))) {
      valence *= 1.25;
    } else if (is(3, "without") && (is(2, "doubt") || is(1, "doubt"))) {
      // unchanged
    } else if (negated(lw[i - 3])) {
      valence *= SentimentAnalyzer::kNegationScalar;
    }
  }
  return valence;
}

double special_idioms_check(double valence, const std::vector<std::string>& lw, std::size_t i) {
  const auto& cases = special_cases();
  const std::string onezero = lw[i - 1] + " " + lw[i];
  const std::string twoonezero = lw[i - 2] + " " + lw[i - 1] + " " + lw[i];
  const std::string twoone = lw[i - 2] + " " + lw[i - 1];
  const std::string threetwoone = lw[i - 3] + " " + lw[i - 2] + " " + lw[i - 1];
  const std::string threetwo = lw[i - 3] + " " + lw[i - 2];
  for (const std::string* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
    if (auto it = cases.find(*seq); it != cases.end()) {
      valence = it->second;
      break;
    }
  }
  if (lw.size() - 1 > i) {
    if (auto it = cases.find(lw[i] + " " + lw[i + 1]); it != cases.end()) valence = it->second;
  }
  if (lw.size() - 1 > i + 1) {
    if (auto it = cases.find(lw[i] + " " + lw[i + 1] + " " + lw[i + 2]); it != cases.end()) valence = it->second;
  }
  const auto& boosters = booster_dict();
  for (const std::string* ngram : {&threetwoone, &threetwo, &twoone}) {
    if (auto it = boosters.find(*ngram); it != boosters.end()) valence += it->second;
  }
  return valence;
}

// Reproduces the reference's list.index()-based loop, including its
// behaviour when several sentiments share a value.
void but_check(const std::vector<std::string>& lw, std::vector<double>& sentiments) {
  auto but = std::find(lw.begin(), lw.end(), "but");
  if (but == lw.end()) return;
  const auto bi = static_cast<std::size_t>(but - lw.begin());
  for (std::size_t p = 0; p < sentiments.size(); ++p) {
    const double v = sentiments[p];
    const auto si = static_cast<std::size_t>(std::find(sentiments.begin(), sentiments.end(), v) - sentiments.begin());
    if (si < bi) {
      sentiments[si] = v * 0.5;
    } else if (si > bi) {
      sentiments[si] = v * 1.5;
    }
  }
}

double punctuation_emphasis(std::string_view text) {
  const auto ep = std::min<long>(std::count(text.begin(), text.end(), '!'), SentimentAnalyzer::kMaxExclamations);
  const auto qm = std::count(text.begin(), text.end(), '?');
  double qm_amp = 0.0;
  if (qm > 1) qm_amp = qm <= 3 ? static_cast<double>(qm) * 0.18 : 0.96;
  return static_cast<double>(ep) * SentimentAnalyzer::kExclamationIncrement + qm_amp;
}

std::string_view strip_ascii_space(std::string_view s) {
  while (!s.empty() && is_split_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_split_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

double normalize_valence(double score, double alpha) {
  const double norm = score / std::sqrt(score * score + alpha);
  return std::clamp(norm, -1.0, 1.0);
}

SentimentAnalyzer::SentimentAnalyzer(std::istream& lexicon, std::istream& emoji_lexicon) {
  std::string line;
  while (std::getline(lexicon, line)) {
    std::string_view v = strip_ascii_space(line);
    if (v.empty()) continue;
    const auto tab = v.find('\t');
    if (tab == std::string_view::npos) throw Error(ErrorCode::kParse, fmt::format("bad lexicon line '{}'", v));
    auto rest = v.substr(tab + 1);
    rest = rest.substr(0, rest.find('\t'));
    lexicon_[std::string(v.substr(0, tab))] = std::stod(std::string(rest));
  }
  while (std::getline(emoji_lexicon, line)) {
    std::string_view v = strip_ascii_space(line);
    if (v.empty()) continue;
    const auto tab = v.find('\t');
    if (tab == std::string_view::npos) continue;
    auto rest = v.substr(tab + 1);
    emoji_[std::string(v.substr(0, tab))] = std::string(rest.substr(0, rest.find('\t')));
  }
}

SentimentAnalyzer SentimentAnalyzer::load(const std::filesystem::path& dir) {
  std::ifstream lex(dir / "vader_lexicon.txt", std::ios::binary);
  std::ifstream emo(dir / "emoji_utf8_lexicon.txt", std::ios::binary);
  if (!lex || !emo) {
    throw Error(ErrorCode::kIo, fmt::format("sentiment lexicons not found under '{}'", dir.string()));
  }
  return SentimentAnalyzer(lex, emo);
}

const SentimentAnalyzer& SentimentAnalyzer::bundled() {
  static const SentimentAnalyzer kInstance = load(data_dir());
  return kInstance;
}

SentimentAnalyzer::Sifted SentimentAnalyzer::valences(std::string_view raw) const {
  // Emoji become their textual descriptions.
  std::string text;
  text.reserve(raw.size());
  bool prev_space = true;
  for (std::size_t i = 0; i < raw.size();) {
    const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(raw[i])), raw.size() - i);
    const std::string cp(raw.substr(i, len));
    i += len;
    if (auto it = emoji_.find(cp); it != emoji_.end()) {
      if (!prev_space) text.push_back(' ');
      text += it->second;
      prev_space = false;
    } else {
      text += cp;
      prev_space = cp == " ";
    }
  }
  Sifted out;
  out.text = std::string(strip_ascii_space(text));

  const std::vector<std::string> words = split_words(out.text);
  std::vector<std::string> lw;
  lw.reserve(words.size());
  for (const auto& w : words) lw.push_back(lower(w));
  const bool cap_diff = allcap_differential(words);

  out.sentiments.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (booster_dict().contains(lw[i]) || (i + 1 < words.size() && lw[i] == "kind" && lw[i + 1] == "of")) {
      out.sentiments.push_back(0.0);
      continue;
    }
    out.sentiments.push_back(word_valence(words, lw, i, cap_diff));
  }
  but_check(lw, out.sentiments);
  return out;
}

double SentimentAnalyzer::word_valence(const std::vector<std::string>& words, const std::vector<std::string>& lw,
                                       std::size_t i, bool cap_diff) const {
  const std::string& item_lower = lw[i];
  auto lex = lexicon_.find(item_lower);
  if (lex == lexicon_.end()) return 0.0;
  double valence = lex->second;

  if (item_lower == "no" && i != words.size() - 1 && in_lexicon(lw[i + 1])) valence = 0.0;
  if ((i > 0 && lw[i - 1] == "no") || (i > 1 && lw[i - 2] == "no") ||
      (i > 2 && lw[i - 3] == "no" && (lw[i - 1] == "or" || lw[i - 1] == "nor"))) {
    valence = lex->second * kNegationScalar;
  }

  if (is_upper(words[i]) && cap_diff) valence += valence > 0 ? kCapsIncrement : -kCapsIncrement;

  for (int start_i = 0; start_i < 3; ++start_i) {
    const auto back = static_cast<std::size_t>(start_i + 1);
    if (i > static_cast<std::size_t>(start_i) && !in_lexicon(lw[i - back])) {
      double s = scalar_inc_dec(words[i - back], valence, cap_diff);
      if (start_i == 1 && s != 0) s *= 0.95;
      if (start_i == 2 && s != 0) s *= 0.9;
      valence += s;
      valence = negation_check(valence, lw, start_i, i);
      if (start_i == 2) valence = special_idioms_check(valence, lw, i);
    }
  }

  // "least" as negation, except in "at least" / "very least".
  if (i > 1 && !in_lexicon(lw[i - 1]) && lw[i - 1] == "least") {
    if (lw[i - 2] != "at" && lw[i - 2] != "very") valence *= kNegationScalar;
  } else if (i > 0 && !in_lexicon(lw[i - 1]) && lw[i - 1] == "least") {
    valence *= kNegationScalar;
  }
  return valence;
}

double SentimentAnalyzer::raw_valence_sum(std::string_view text) const {
  return emphasized_sum(valences(text));
}

double SentimentAnalyzer::emphasized_sum(const Sifted& s) {
  double sum = 0.0;
  for (double v : s.sentiments) sum += v;
  const double amp = punctuation_emphasis(s.text);
  if (sum > 0) {
    sum += amp;
  } else if (sum < 0) {
    sum -= amp;
  }
  return sum;
}

RuleSentimentScores SentimentAnalyzer::score(std::string_view text) const {
  const Sifted s = valences(text);
  if (s.sentiments.empty()) return {};

  const double sum = emphasized_sum(s);
  const double amp = punctuation_emphasis(s.text);

  double pos_sum = 0.0;
  double neg_sum = 0.0;
  double neu_count = 0.0;
  for (double v : s.sentiments) {
    if (v > 0) pos_sum += v + 1;  // neutral words count as 1
    if (v < 0) neg_sum += v - 1;
    if (v == 0) neu_count += 1;
  }
  if (pos_sum > std::fabs(neg_sum)) {
    pos_sum += amp;
  } else if (pos_sum < std::fabs(neg_sum)) {
    neg_sum -= amp;
  }
  const double total = pos_sum + std::fabs(neg_sum) + neu_count;
  return RuleSentimentScores{std::fabs(neg_sum / total), std::fabs(neu_count / total), std::fabs(pos_sum / total),
                             normalize_valence(sum)};
}

}  // namespace counterbot
