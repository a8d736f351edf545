#include "gecforge/seq2seq/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "gecforge/corpus.hpp"

namespace gecforge::seq2seq {

namespace {

constexpr std::string_view kMagic = "gecforge-seq2seq";
constexpr int kVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : in_{std::string(text)} {}
  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(line_ + 1, std::string("unexpected end of checkpoint, expected ") + what);
    ++line_;
    return line;
  }
  std::size_t line() const { return line_; }

 private:
  std::istringstream in_;
  std::size_t line_ = 0;
};

void write_vocab(std::ostringstream& os, const char* tag, const Vocabulary& v) {
  auto toks = v.regular_tokens();
  os << tag << ' ' << toks.size() << ' ' << hex64(v.fingerprint()) << '\n';
  for (const auto& t : toks) os << t << '\n';
}

Vocabulary read_vocab(LineReader& in, const char* tag) {
  std::istringstream header(in.next(tag));
  std::string got_tag, hex;
  std::size_t n = 0;
  if (!(header >> got_tag >> n >> hex) || got_tag != tag) throw ParseError(in.line(), std::string("expected ") + tag);
  std::vector<std::string> toks;
  toks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) toks.push_back(in.next("vocabulary token"));
  Vocabulary v = Vocabulary::from_tokens(toks);
  if (hex64(v.fingerprint()) != hex) throw ParseError(in.line(), std::string(tag) + " fingerprint mismatch");
  return v;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const auto& m = ckpt.model;
  std::ostringstream os;
  os << kMagic << ' ' << kVersion << '\n';
  os << "direction " << to_string(ckpt.direction) << '\n';
  const auto& d = m.dims();
  os << "dims " << d.embed << ' ' << d.hidden << ' ' << d.src_vocab << ' ' << d.tgt_vocab << '\n';
  write_vocab(os, "src_vocab", m.source_vocab());
  write_vocab(os, "tgt_vocab", m.target_vocab());
  char buf[40];
  m.params().for_each([&](const std::string& name, const auto& t) {
    os << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", t.data()[i]);
      if (i) os << ' ';
      os << buf;
    }
    os << '\n';
  });
  return os.str();
}

Checkpoint deserialize_checkpoint(std::string_view text) {
  LineReader in(text);
  {
    std::istringstream header(in.next("magic"));
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != kMagic) throw ParseError(1, "not a gecforge seq2seq checkpoint");
    if (version != kVersion) throw ParseError(1, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  {
    std::istringstream line(in.next("direction"));
    std::string tag, dir;
    if (!(line >> tag >> dir) || tag != "direction") throw ParseError(in.line(), "expected direction");
    try {
      ckpt.direction = parse_direction(dir);
    } catch (const std::invalid_argument& e) {
      throw ParseError(in.line(), e.what());
    }
  }
  ModelDims dims;
  {
    std::istringstream line(in.next("dims"));
    std::string tag;
    if (!(line >> tag >> dims.embed >> dims.hidden >> dims.src_vocab >> dims.tgt_vocab) || tag != "dims") {
      throw ParseError(in.line(), "expected dims");
    }
  }
  Vocabulary src = read_vocab(in, "src_vocab");
  Vocabulary tgt = read_vocab(in, "tgt_vocab");
  if (src.size() != dims.src_vocab || tgt.size() != dims.tgt_vocab) {
    throw ParseError(in.line(), "vocabulary sizes disagree with dims");
  }

  auto params = Seq2SeqParams<double>::zeros(dims);
  params.for_each([&](const std::string& name, auto& t) {
    std::istringstream header(in.next("tensor header"));
    std::string tag, got;
    Eigen::Index rows = 0, cols = 0;
    if (!(header >> tag >> got >> rows >> cols) || tag != "tensor" || got != name) {
      throw ParseError(in.line(), "expected tensor " + name);
    }
    if (rows != t.rows() || cols != t.cols()) throw ParseError(in.line(), "tensor " + name + " has wrong shape");
    const std::string values = in.next("tensor values");
    const char* p = values.c_str();
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      char* end = nullptr;
      t.data()[i] = std::strtod(p, &end);
      if (end == p) throw ParseError(in.line(), "tensor " + name + " is short of values");
      p = end;
    }
  });
  ckpt.model = Seq2SeqModel<double>(std::move(src), std::move(tgt), dims, std::move(params));
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) { write_file(path, serialize_checkpoint(ckpt)); }

Checkpoint load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace gecforge::seq2seq
