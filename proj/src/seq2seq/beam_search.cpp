#include "gecforge/seq2seq/beam_search.hpp"

#include "gecforge/seq2seq/model.hpp"

namespace gecforge::seq2seq {

static_assert(StepDecoder<Seq2SeqModel<double>::Session>);
static_assert(StepDecoder<Seq2SeqModel<float>::Session>);

}  // namespace gecforge::seq2seq
