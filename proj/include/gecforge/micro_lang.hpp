#ifndef GECFORGE_MICRO_LANG_HPP
#define GECFORGE_MICRO_LANG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gecforge/corpus.hpp"
#include "gecforge/rng.hpp"

namespace gecforge::micro {

/// A small rule-governed English fragment: subject-verb agreement, article
/// choice, verb-specific prepositions, noun number. Sentences are built
/// from templates over a ~60-word vocabulary.

/// Every token the generator can produce in a correct sentence.
std::vector<std::string> vocabulary();

/// One grammatical sentence.
Sentence sample_sentence(Rng& rng);

struct LearnerSentence {
  Sentence clean;
  AnnotatedSentence errorful;  // source = learner text, annotator 0 = corrections
};

/// Injects one or two learner-style errors (article and preposition
/// confusions, dropped articles and prepositions, agreement and number
/// slips, spurious articles before names) and records the corrections
/// exactly, in errorful-sentence coordinates.
LearnerSentence corrupt(const Sentence& clean, Rng& rng);

struct MicroCorpusSizes {
  std::size_t base = 2000;
  std::size_t dev = 100;
  std::size_t test = 150;
  std::size_t monolingual = 3000;
};

struct MicroCorpus {
  std::vector<ParallelPair> base;       // real learner pairs, all errorful
  std::vector<ParallelPair> dev;
  std::vector<AnnotatedSentence> test;  // gold M2
  std::vector<Sentence> monolingual;    // clean text for error generation
};

/// Deterministic for a given seed; the four parts are drawn from
/// independent streams.
MicroCorpus generate(const MicroCorpusSizes& sizes, std::uint64_t seed);

/// Writes base.tsv, dev.tsv, test.m2 and monolingual.txt into `dir`.
void emit(const MicroCorpus& corpus, const std::string& dir);

}  // namespace gecforge::micro

#endif  // GECFORGE_MICRO_LANG_HPP
