#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "nnsi/common.hpp"
#include "nnsi/corpus.hpp"

namespace nnsi {

// Synthetic intent corpus. Intents are action/topic pairs drawn from
// shared lexicons, so neighboring intents overlap lexically and
// genuinely ambiguous utterances exist.
struct SynthSpec {
  int num_intents = 33;
  int templates_per_intent = 4;
  double paraphrase_rate = 0.3;
  int samples_per_intent = 150;
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double word_drop_rate = 0.0;
  double word_substitution_rate = 0.0;
  double character_corruption_rate = 0.0;
  double homophone_swap_rate = 0.0;
  std::uint64_t seed = 0;
};

namespace lex {

struct Slot {
  const char* primary;
  std::vector<const char*> variants;  // paraphrases of the primary
};

inline const std::vector<Slot>& actions() {
  static const std::vector<Slot> v = {
      {"check", {"look up", "see", "verify", "check on"}},
      {"update", {"change", "modify", "fix"}},
      {"cancel", {"stop", "close", "terminate"}},
      {"create", {"open", "set up", "start"}},
      {"report a problem with", {"complain about", "report an issue with"}},
      {"ask about", {"get information on", "find out about"}},
      {"pay", {"make a payment on", "settle"}},
      {"renew", {"extend", "keep"}},
  };
  return v;
}

inline const std::vector<Slot>& topics() {
  static const std::vector<Slot> v = {
      {"bill", {"billing statement", "invoice", "charges"}},
      {"account", {"profile", "customer account"}},
      {"password", {"login password", "pin code"}},
      {"delivery", {"shipment", "package"}},
      {"refund", {"reimbursement", "money back"}},
      {"order", {"purchase", "recent order"}},
      {"appointment", {"visit", "meeting"}},
      {"insurance", {"coverage", "policy"}},
      {"loan", {"credit", "mortgage"}},
      {"internet", {"wifi", "connection"}},
      {"phone plan", {"mobile plan", "cell plan"}},
      {"warranty", {"guarantee", "service plan"}},
  };
  return v;
}

// Action-specific closing phrases; parallel to actions().
inline const std::vector<std::vector<const char*>>& action_tails() {
  static const std::vector<std::vector<const char*>> v = {
      {"what is the status", "has anything changed", "i just want the status"},
      {"the details are wrong", "it is out of date", "the info needs correcting"},
      {"i do not need it anymore", "effective today", "i changed my mind"},
      {"from scratch", "as soon as possible", "a brand new one"},
      {"it is not working", "something went wrong", "it keeps failing"},
      {"i have a question", "just wondering", "i am a bit confused"},
      {"with my card", "before the due date", "the full balance"},
      {"for another year", "before it expires", "same terms as before"},
  };
  return v;
}

// Topic-specific detail phrases; parallel to topics().
inline const std::vector<std::vector<const char*>>& topic_details() {
  static const std::vector<std::vector<const char*>> v = {
      {"from last month", "the amount looks wrong", "for this cycle"},
      {"under my email", "in the app", "the one i registered"},
      {"since i got locked out", "for my login", "it will not accept it"},
      {"with the tracking number", "that was due yesterday", "from the courier"},
      {"for the returned item", "from my last purchase", "it never arrived"},
      {"i placed last week", "number five five one", "the big one"},
      {"scheduled for friday", "with the technician", "at the clinic"},
      {"under my current policy", "for the whole family", "the premium"},
      {"on the house", "the monthly installments", "the interest rate"},
      {"at home", "the router keeps blinking", "it is really slow"},
      {"with unlimited data", "on my second line", "the data allowance"},
      {"on the washing machine", "that came with the purchase",
       "before it runs out"},
  };
  return v;
}

inline const std::vector<const char*>& greetings() {
  static const std::vector<const char*> v = {"", "hi", "hello", "hey"};
  return v;
}

inline const std::vector<const char*>& fillers() {
  static const std::vector<const char*> v = {
      "i want to", "i need to", "can you", "how do i"};
  return v;
}

inline const std::vector<const char*>& tails() {
  static const std::vector<const char*> v = {"", "please", "thanks"};
  return v;
}

// word -> homophone candidates
inline const std::unordered_map<std::string, std::vector<std::string>>&
homophones() {
  static const std::unordered_map<std::string, std::vector<std::string>> t = {
      {"to", {"two", "too"}},   {"for", {"four"}},     {"by", {"buy", "bye"}},
      {"no", {"know"}},         {"there", {"their"}},  {"right", {"write"}},
      {"one", {"won"}},         {"see", {"sea"}},      {"hi", {"high"}},
      {"week", {"weak"}},       {"plan", {"plain"}},   {"loan", {"lone"}},
      {"new", {"knew"}},        {"would", {"wood"}},   {"be", {"bee"}},
      {"hey", {"hay"}},         {"i", {"eye"}},        {"you", {"ewe"}},
  };
  return t;
}

// word -> common STT misrecognition
inline const std::unordered_map<std::string, std::string>& confusions() {
  static const std::unordered_map<std::string, std::string> t = {
      {"cancel", "cancer"},          {"update", "up date"},
      {"account", "a count"},        {"password", "pass word"},
      {"internet", "inter net"},     {"delivery", "the livery"},
      {"appointment", "a point"},    {"insurance", "in sure"},
      {"invoice", "in voice"},       {"refund", "re fund"},
      {"renew", "we knew"},          {"verify", "very fine"},
      {"statement", "state men"},    {"warranty", "warren tea"},
      {"order", "odor"},             {"payment", "pay men"},
      {"check", "chuck"},            {"create", "crate"},
      {"open", "opened"},            {"close", "clothes"},
      {"please", "police"},          {"charges", "charge is"},
      {"wifi", "why fi"},            {"coverage", "cover age"},
      {"mortgage", "more gauge"},    {"purchase", "per chess"},
      {"shipment", "ship meant"},    {"profile", "pro file"},
  };
  return t;
}

}  // namespace lex

namespace detail {

inline std::string pick_slot(const lex::Slot& slot, double paraphrase_rate,
                             Rng& rng) {
  if (!slot.variants.empty() && rng.bernoulli(paraphrase_rate))
    return slot.variants[rng.below(slot.variants.size())];
  return slot.primary;
}

inline void append_word(std::string& out, const std::string& word) {
  if (word.empty()) return;
  if (!out.empty()) out.push_back(' ');
  out += word;
}

}  // namespace detail

// Fully labeled corpus; exactly samples_per_intent per class,
// deterministic per seed.
inline Corpus generate(const SynthSpec& spec) {
  if (spec.num_intents < 2) throw Error("generate: need at least 2 intents");
  if (spec.templates_per_intent < 1)
    throw Error("generate: empty template set");
  if (spec.samples_per_intent < 1)
    throw Error("generate: samples_per_intent must be positive");
  if (spec.paraphrase_rate < 0 || spec.paraphrase_rate > 1)
    throw Error("generate: paraphrase_rate out of [0,1]");

  const auto& actions = lex::actions();
  const auto& topics = lex::topics();
  const int max_intents =
      static_cast<int>(actions.size() * topics.size());
  if (spec.num_intents > max_intents)
    throw Error("generate: at most " + std::to_string(max_intents) +
                " intents supported");

  // Action cycles fastest, so consecutive intents share a topic and the
  // same actions recur across topics. Both axes overlap lexically.
  Corpus corpus;
  std::vector<std::pair<int, int>> intent_slots;  // (action, topic)
  for (int i = 0; i < spec.num_intents; ++i) {
    int a = i % static_cast<int>(actions.size());
    int t = (i / static_cast<int>(actions.size())) %
            static_cast<int>(topics.size());
    intent_slots.push_back({a, t});
    corpus.label_names.push_back(std::string(actions[a].primary) + "_" +
                                 topics[t].primary);
  }
  // intent names may repeat words; make them unique label strings
  for (auto& name : corpus.label_names)
    for (char& c : name)
      if (c == ' ') c = '-';

  constexpr int kNumPatterns = 6;
  for (int i = 0; i < spec.num_intents; ++i) {
    const auto& [a, t] = intent_slots[i];
    for (int k = 0; k < spec.samples_per_intent; ++k) {
      Rng rng(hash_combine(spec.seed,
                           hash_combine(fnv1a("synth-sample"),
                                        static_cast<std::uint64_t>(i) * 1000003 +
                                            static_cast<std::uint64_t>(k))));
      int tmpl = k % std::min(spec.templates_per_intent, kNumPatterns);
      int pattern = (i * 2 + tmpl) % kNumPatterns;
      std::string action =
          detail::pick_slot(actions[a], spec.paraphrase_rate, rng);
      std::string topic =
          detail::pick_slot(topics[t], spec.paraphrase_rate, rng);
      // Most lexical mass sits in intent-bearing slots (action, topic,
      // detail, closing); greetings and fillers stay occasional.
      std::string greet =
          rng.bernoulli(0.4)
              ? lex::greetings()[1 + rng.below(lex::greetings().size() - 1)]
              : "";
      std::string filler = lex::fillers()[rng.below(lex::fillers().size())];
      std::string topic_detail =
          rng.bernoulli(0.8) ? lex::topic_details()[t][rng.below(
                                   lex::topic_details()[t].size())]
                             : "";
      std::string closing =
          rng.bernoulli(0.7)
              ? lex::action_tails()[a][rng.below(lex::action_tails()[a].size())]
              : lex::tails()[rng.below(lex::tails().size())];

      std::string text;
      switch (pattern) {
        case 0:
          detail::append_word(text, greet);
          detail::append_word(text, filler);
          detail::append_word(text, action);
          detail::append_word(text, "my");
          detail::append_word(text, topic);
          detail::append_word(text, topic_detail);
          detail::append_word(text, closing);
          break;
        case 1:
          detail::append_word(text, filler);
          detail::append_word(text, action);
          detail::append_word(text, "my");
          detail::append_word(text, topic);
          detail::append_word(text, topic_detail);
          break;
        case 2:
          detail::append_word(text, action);
          detail::append_word(text, topic);
          detail::append_word(text, topic_detail);
          detail::append_word(text, closing);
          break;
        case 3:
          detail::append_word(text, greet);
          detail::append_word(text, "i need help to");
          detail::append_word(text, action);
          detail::append_word(text, "my");
          detail::append_word(text, topic);
          detail::append_word(text, topic_detail);
          break;
        case 4:
          detail::append_word(text, "about my");
          detail::append_word(text, topic);
          detail::append_word(text, topic_detail);
          detail::append_word(text, "can you");
          detail::append_word(text, action);
          detail::append_word(text, "it");
          detail::append_word(text, closing);
          break;
        default:
          detail::append_word(text, greet);
          detail::append_word(text, "so");
          detail::append_word(text, filler);
          detail::append_word(text, action);
          detail::append_word(text, "the");
          detail::append_word(text, topic);
          detail::append_word(text, closing);
          break;
      }
      Sample s;
      s.id = "syn-" + std::to_string(i) + "-" + std::to_string(k);
      s.text = std::move(text);
      s.label = i;
      corpus.samples.push_back(std::move(s));
    }
  }
  return corpus;
}

// STT-style corruption: word drops, homophone swaps, confusion-table
// substitutions, and character edits, each Bernoulli per site.
// Deterministic per (text, seed); all-zero rates return the input.
inline std::string corrupt(const std::string& text, const NoiseSpec& spec) {
  for (double rate :
       {spec.word_drop_rate, spec.word_substitution_rate,
        spec.character_corruption_rate, spec.homophone_swap_rate})
    if (rate < 0 || rate > 1) throw Error("corrupt: rate out of [0,1]");

  Rng rng(hash_combine(spec.seed, fnv1a(text)));
  std::istringstream words(text);
  std::string word;
  std::string out;
  while (words >> word) {
    if (rng.bernoulli(spec.word_drop_rate)) continue;

    auto hom = lex::homophones().find(word);
    if (hom != lex::homophones().end() &&
        rng.bernoulli(spec.homophone_swap_rate)) {
      word = hom->second[rng.below(hom->second.size())];
    } else if (rng.bernoulli(spec.word_substitution_rate)) {
      auto conf = lex::confusions().find(word);
      if (conf != lex::confusions().end()) word = conf->second;
    }

    if (spec.character_corruption_rate > 0) {
      std::string edited;
      for (std::size_t i = 0; i < word.size(); ++i) {
        if (rng.bernoulli(spec.character_corruption_rate)) {
          switch (rng.below(3)) {
            case 0:  // delete
              break;
            case 1:  // substitute
              edited.push_back(static_cast<char>('a' + rng.below(26)));
              break;
            default:  // duplicate
              edited.push_back(word[i]);
              edited.push_back(word[i]);
              break;
          }
        } else {
          edited.push_back(word[i]);
        }
      }
      word = std::move(edited);
    }
    detail::append_word(out, word);
  }
  return out;
}

// Per-utterance severity mixture: a fraction of samples is corrupted
// much harder than the rest, the way a bad microphone or noisy room
// wrecks some recordings while most come through nearly clean.
struct SeverityMixture {
  double heavy_fraction = 0.35;
  double heavy_multiplier = 2.8;
  double light_multiplier = 0.4;
};

inline NoiseSpec scale_rates(const NoiseSpec& spec, double mult) {
  auto clamp = [](double r) { return r > 1.0 ? 1.0 : r; };
  NoiseSpec out = spec;
  out.word_drop_rate = clamp(spec.word_drop_rate * mult);
  out.word_substitution_rate = clamp(spec.word_substitution_rate * mult);
  out.character_corruption_rate =
      clamp(spec.character_corruption_rate * mult);
  out.homophone_swap_rate = clamp(spec.homophone_swap_rate * mult);
  return out;
}

inline Corpus corrupt_corpus(const Corpus& corpus, const NoiseSpec& spec,
                             const SeverityMixture& mix) {
  if (mix.heavy_fraction < 0 || mix.heavy_fraction > 1)
    throw Error("corrupt_corpus: heavy_fraction out of [0,1]");
  Corpus out;
  out.label_names = corpus.label_names;
  for (const Sample& s : corpus.samples) {
    Rng pick(hash_combine(spec.seed,
                          hash_combine(fnv1a("severity"), fnv1a(s.id))));
    double mult = pick.bernoulli(mix.heavy_fraction) ? mix.heavy_multiplier
                                                     : mix.light_multiplier;
    NoiseSpec per_sample = scale_rates(spec, mult);
    per_sample.seed = hash_combine(spec.seed, fnv1a(s.id));
    Sample c = s;
    c.text = corrupt(s.text, per_sample);
    if (detail::trim(c.text).empty()) c.text = "uh";
    out.samples.push_back(std::move(c));
  }
  return out;
}

// Per-sample seeds derive from the sample id, so corruption of one
// sample is independent of corpus order.
inline Corpus corrupt_corpus(const Corpus& corpus, const NoiseSpec& spec) {
  Corpus out;
  out.label_names = corpus.label_names;
  for (const Sample& s : corpus.samples) {
    NoiseSpec per_sample = spec;
    per_sample.seed = hash_combine(spec.seed, fnv1a(s.id));
    Sample c = s;
    c.text = corrupt(s.text, per_sample);
    if (detail::trim(c.text).empty()) c.text = "uh";  // keep sample valid
    out.samples.push_back(std::move(c));
  }
  return out;
}

// Default profile: calibrated so the baseline classifier degrades
// noticeably on a corrupted test set but nearest neighbors of a
// corrupted utterance still tend to share its intent.
inline NoiseSpec default_stt_profile(std::uint64_t seed = 0) {
  NoiseSpec spec;
  spec.word_drop_rate = 0.06;
  spec.word_substitution_rate = 0.15;
  spec.character_corruption_rate = 0.015;
  spec.homophone_swap_rate = 0.112;
  spec.seed = seed;
  return spec;
}

}  // namespace nnsi
