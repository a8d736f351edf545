#include <doctest.h>

#include "gecforge/sentence.hpp"

using gecforge::Sentence;

TEST_CASE("whitespace tokenization round trips") {
  auto s = Sentence::from_text("  The cat\tsat .  ");
  CHECK(s.tokens == std::vector<std::string>{"The", "cat", "sat", "."});
  CHECK(s.str() == "The cat sat .");
  CHECK(Sentence::from_text(s.str()) == s);
  CHECK(Sentence::from_text("").empty());
}

TEST_CASE("raw tokenizer splits punctuation and clitics") {
  CHECK(gecforge::tokenize_raw("He didn't go, she's here.").str() == "He did n't go , she 's here .");
  CHECK(gecforge::tokenize_raw("(a) b!").str() == "( a ) b !");
  auto once = gecforge::tokenize_raw("It's fine.");
  CHECK(gecforge::tokenize_raw(once.str()) == once);
}

TEST_CASE("normalize_space collapses runs") {
  CHECK(gecforge::normalize_space("  a   b \t c ") == "a b c");
}
