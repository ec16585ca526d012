#include <charconv>
#include <cmath>

#include "dsel/classifier.hpp"

namespace dsel {

namespace {

constexpr std::string_view magic = "dsel-model 1";

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 0;

  bool next(std::string_view& out) {
    if (pos >= text.size()) return false;
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    out = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line;
    return true;
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::data, "model line " + std::to_string(line) + ": " + what);
  }

  std::string_view expect(std::string_view key) {
    std::string_view l;
    if (!next(l)) {
      ++line;
      error("truncated file, expected '" + std::string(key) + "'");
    }
    if (!l.starts_with(key) || l.size() <= key.size() || l[key.size()] != ' ')
      error("expected '" + std::string(key) + " <value>'");
    return l.substr(key.size() + 1);
  }
};

std::size_t parse_size(std::string_view s, const LineReader& r) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) r.error("bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string format_model(const Model& model) {
  std::size_t nonzero = 1;  // bias line is always written
  for (std::size_t j = 1; j < model.weights.size(); ++j) nonzero += model.weights[j] != 0.0;
  std::string out(magic);
  out += "\nvocab_size " + std::to_string(model.vocab_size);
  out += "\nconfig " + describe(model.config);
  out += "\npairing " + pairing_name(model.pairing);
  out += "\nvocab_hash " + (model.vocab_hash.empty() ? std::string("-") : model.vocab_hash);
  out += "\nnonzero " + std::to_string(nonzero) + "\n";
  out += "0 " + format_double(model.weights.at(0)) + "\n";
  for (std::size_t j = 1; j < model.weights.size(); ++j)
    if (model.weights[j] != 0.0) out += std::to_string(j) + " " + format_double(model.weights[j]) + "\n";
  return out;
}

Model parse_model(std::string_view text) {
  LineReader r{text};
  std::string_view l;
  if (!r.next(l) || l != magic) {
    r.line = std::max<std::size_t>(r.line, 1);
    r.error("not a dsel model file");
  }
  Model m;
  m.vocab_size = parse_size(r.expect("vocab_size"), r);
  try {
    m.config = parse_description(r.expect("config"));
    m.pairing = parse_pairing(r.expect("pairing"));
  } catch (const Error& e) {
    r.error(e.what());
  }
  m.vocab_hash = std::string(r.expect("vocab_hash"));
  if (m.vocab_hash == "-") m.vocab_hash.clear();
  const std::size_t nonzero = parse_size(r.expect("nonzero"), r);
  m.weights.assign(m.vocab_size + 1, 0.0);
  for (std::size_t k = 0; k < nonzero; ++k) {
    if (!r.next(l)) {
      ++r.line;
      r.error("truncated file: expected " + std::to_string(nonzero) + " weight lines, got " + std::to_string(k));
    }
    auto sp = l.find(' ');
    if (sp == std::string_view::npos) r.error("expected '<id> <value>'");
    const std::size_t id = parse_size(l.substr(0, sp), r);
    if (id > m.vocab_size) r.error("weight id " + std::to_string(id) + " exceeds vocab_size");
    if (k == 0 && id != 0) r.error("first weight line must be the bias (id 0)");
    double value = 0.0;
    try {
      value = parse_double(l.substr(sp + 1));
    } catch (const std::invalid_argument& e) {
      r.error(e.what());
    }
    if (!std::isfinite(value)) r.error("non-finite weight");
    m.weights[id] = value;
  }
  while (r.next(l))
    if (!l.empty()) r.error("unexpected trailing content");
  return m;
}

void save_model(const Model& model, const std::string& path) { write_file(path, format_model(model)); }

Model load_model(const std::string& path) {
  try {
    return parse_model(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    fail(e.kind(), path + ": " + e.what());
  }
}

void check_compatible(const Model& model, const Vocabulary& vocab) {
  if (model.vocab_size != vocab.size())
    fail(ErrorKind::data, "model vocab_size " + std::to_string(model.vocab_size) +
                              " does not match vocabulary size " + std::to_string(vocab.size()));
  if (model.vocab_hash != vocab.hash())
    fail(ErrorKind::data, "model vocabulary hash " + model.vocab_hash + " does not match " + vocab.hash());
}

}  // namespace dsel
