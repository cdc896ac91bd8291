#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "nnsi/common.hpp"
#include "nnsi/corpus.hpp"
#include "nnsi/noise.hpp"
#include "nnsi/vectorize.hpp"

using namespace nnsi;

TEST_CASE("generate produces the requested class balance") {
  SynthSpec spec;
  spec.num_intents = 2;
  spec.templates_per_intent = 1;
  spec.samples_per_intent = 10;
  spec.seed = 1;
  Corpus c = generate(spec);
  CHECK(c.size() == 20);
  CHECK(c.num_classes() == 2);
  std::map<int, int> counts;
  for (const auto& s : c.samples) ++counts[*s.label];
  CHECK(counts[0] == 10);
  CHECK(counts[1] == 10);
}

TEST_CASE("generate is deterministic per seed") {
  SynthSpec spec;
  spec.num_intents = 5;
  spec.samples_per_intent = 30;
  spec.seed = 9;
  Corpus a = generate(spec);
  Corpus b = generate(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.samples[i].id == b.samples[i].id);
    CHECK(a.samples[i].text == b.samples[i].text);
  }
  spec.seed = 10;
  Corpus other = generate(spec);
  int differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.samples[i].text != other.samples[i].text) ++differing;
  CHECK(differing > 0);
}

TEST_CASE("the default profile mirrors a 33-intent task") {
  SynthSpec spec;
  Corpus c = generate(spec);
  CHECK(c.num_classes() == 33);
  std::set<std::string> names(c.label_names.begin(), c.label_names.end());
  CHECK(names.size() == 33);  // label names unique
}

TEST_CASE("intents overlap lexically by construction") {
  SynthSpec spec;
  spec.num_intents = 16;
  spec.samples_per_intent = 40;
  spec.seed = 3;
  Corpus c = generate(spec);
  // count token collisions across different intents
  std::map<std::string, std::set<int>> token_intents;
  for (const auto& s : c.samples)
    for (const auto& tok : tokenize(s.text)) token_intents[tok].insert(*s.label);
  int shared = 0;
  for (const auto& [tok, intents] : token_intents)
    if (intents.size() >= 4) ++shared;
  CHECK(shared > 10);
}

TEST_CASE("generate validates its spec") {
  SynthSpec spec;
  spec.num_intents = 1;
  CHECK_THROWS_AS(generate(spec), Error);
  spec.num_intents = 2;
  spec.templates_per_intent = 0;
  CHECK_THROWS_WITH_AS(generate(spec), doctest::Contains("template"), Error);
}

TEST_CASE("all-zero rates corrupt nothing") {
  NoiseSpec spec;
  CHECK(corrupt("check my billing statement please", spec) ==
        "check my billing statement please");
}

TEST_CASE("full word drop empties the text") {
  NoiseSpec spec;
  spec.word_drop_rate = 1.0;
  CHECK(corrupt("anything at all", spec).empty());
}

TEST_CASE("corrupt is deterministic per text and seed") {
  NoiseSpec spec = default_stt_profile(7);
  std::string text = "i want to cancel my appointment for next week please";
  CHECK(corrupt(text, spec) == corrupt(text, spec));
  spec.seed = 8;
  std::string other = corrupt(text, spec);
  // different stream, almost surely a different corruption
  CHECK(corrupt(text, default_stt_profile(7)) != other);
}

TEST_CASE("corrupt validates rates") {
  NoiseSpec spec;
  spec.word_drop_rate = 1.5;
  CHECK_THROWS_AS(corrupt("x", spec), Error);
}

TEST_CASE("the default profile changes most sentences") {
  NoiseSpec spec = default_stt_profile(3);
  SynthSpec synth;
  synth.num_intents = 8;
  synth.samples_per_intent = 50;
  synth.seed = 5;
  Corpus c = generate(synth);
  int changed = 0;
  for (const auto& s : c.samples) {
    NoiseSpec per = spec;
    per.seed = hash_combine(spec.seed, fnv1a(s.id));
    if (corrupt(s.text, per) != s.text) ++changed;
  }
  CHECK(changed > static_cast<int>(c.size()) / 2);
}

TEST_CASE("scale_rates multiplies and clamps to 1") {
  NoiseSpec spec;
  spec.word_drop_rate = 0.5;
  spec.word_substitution_rate = 0.1;
  NoiseSpec scaled = scale_rates(spec, 3.0);
  CHECK(scaled.word_drop_rate == 1.0);
  CHECK(scaled.word_substitution_rate == doctest::Approx(0.3));
}

TEST_CASE("severity mixture validates heavy_fraction") {
  Corpus c;
  c.samples.push_back({"a", "some text", 0, {}});
  c.label_names = {"x"};
  SeverityMixture mix;
  mix.heavy_fraction = 1.5;
  CHECK_THROWS_AS(corrupt_corpus(c, default_stt_profile(1), mix), Error);
}

TEST_CASE("severity mixture with heavy fraction 1 equals scaled rates") {
  SynthSpec synth;
  synth.num_intents = 4;
  synth.samples_per_intent = 10;
  synth.seed = 5;
  Corpus c = generate(synth);
  NoiseSpec spec = default_stt_profile(9);
  SeverityMixture mix;
  mix.heavy_fraction = 1.0;
  mix.heavy_multiplier = 1.7;
  Corpus mixed = corrupt_corpus(c, spec, mix);
  Corpus scaled = corrupt_corpus(c, scale_rates(spec, 1.7));
  REQUIRE(mixed.size() == scaled.size());
  for (std::size_t i = 0; i < mixed.size(); ++i)
    CHECK(mixed.samples[i].text == scaled.samples[i].text);
}

TEST_CASE("severity mixture is order-independent per sample") {
  SynthSpec synth;
  synth.num_intents = 3;
  synth.samples_per_intent = 8;
  synth.seed = 6;
  Corpus c = generate(synth);
  NoiseSpec spec = default_stt_profile(13);
  Corpus corrupted = corrupt_corpus(c, spec, SeverityMixture{});
  Corpus reversed = c;
  std::reverse(reversed.samples.begin(), reversed.samples.end());
  Corpus corrupted_rev = corrupt_corpus(reversed, spec, SeverityMixture{});
  std::map<std::string, std::string> by_id;
  for (const auto& s : corrupted_rev.samples) by_id[s.id] = s.text;
  for (const auto& s : corrupted.samples) CHECK(by_id.at(s.id) == s.text);
}

TEST_CASE("corrupt_corpus is order-independent per sample") {
  SynthSpec synth;
  synth.num_intents = 4;
  synth.samples_per_intent = 10;
  synth.seed = 2;
  Corpus c = generate(synth);
  NoiseSpec spec = default_stt_profile(11);
  Corpus corrupted = corrupt_corpus(c, spec);

  // reversing corpus order must not change any sample's corruption
  Corpus reversed = c;
  std::reverse(reversed.samples.begin(), reversed.samples.end());
  Corpus corrupted_rev = corrupt_corpus(reversed, spec);
  std::map<std::string, std::string> by_id;
  for (const auto& s : corrupted_rev.samples) by_id[s.id] = s.text;
  for (const auto& s : corrupted.samples) CHECK(by_id.at(s.id) == s.text);
}
