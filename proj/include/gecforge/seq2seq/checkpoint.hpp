#ifndef GECFORGE_SEQ2SEQ_CHECKPOINT_HPP
#define GECFORGE_SEQ2SEQ_CHECKPOINT_HPP

#include <string>
#include <string_view>

#include "gecforge/seq2seq/model.hpp"
#include "gecforge/seq2seq/trainer.hpp"

namespace gecforge::seq2seq {

/// Text checkpoint:
///   gecforge-seq2seq 1
///   direction <correction|generation>
///   dims <E> <H> <Vs> <Vt>
///   src_vocab <n> <fingerprint-hex>    followed by n token lines
///   tgt_vocab <n> <fingerprint-hex>    followed by n token lines
///   tensor <name> <rows> <cols>        followed by one line of %.17g values
/// Values are written with 17 significant digits so reloading is exact.
struct Checkpoint {
  Seq2SeqModel<double> model;
  Direction direction = Direction::correction;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gecforge::seq2seq

#endif  // GECFORGE_SEQ2SEQ_CHECKPOINT_HPP
