#include <algorithm>
#include <charconv>

#include "dsel/features.hpp"
#include "dsel/util.hpp"

namespace dsel {

std::uint32_t Vocabulary::id_of(std::string_view item) const {
  auto it = ids_.find(item);
  return it == ids_.end() ? invalid : it->second;
}

const std::string& Vocabulary::item(std::uint32_t id) const {
  if (id == invalid || id > items_.size())
    throw std::out_of_range("vocabulary id " + std::to_string(id) + " out of range");
  return items_[id - 1];
}

std::uint32_t Vocabulary::add(const std::string& item) {
  if (auto id = id_of(item); id != invalid) return id;
  items_.push_back(item);
  const auto id = static_cast<std::uint32_t>(items_.size());
  ids_.emplace(item, id);
  return id;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    out += std::to_string(i + 1);
    out += '\t';
    out += items_[i];
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary vocab;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto where = "vocabulary line " + std::to_string(line_no) + ": ";
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) fail(ErrorKind::data, where + "expected <id><TAB><item>");
    std::uint32_t id = 0;
    auto [end, ec] = std::from_chars(line.data(), line.data() + tab, id);
    if (ec != std::errc{} || end != line.data() + tab) fail(ErrorKind::data, where + "bad id");
    if (id != vocab.size() + 1)
      fail(ErrorKind::data, where + "ids must ascend densely from 1 (got " + std::to_string(id) + ")");
    std::string item(line.substr(tab + 1));
    if (item.empty()) fail(ErrorKind::data, where + "empty item");
    if (vocab.id_of(item) != invalid) fail(ErrorKind::data, where + "duplicate item '" + item + "'");
    vocab.add(item);
  }
  return vocab;
}

std::string Vocabulary::hash() const { return hex64(fnv1a(serialize())); }

SparseVector intern(Vocabulary& vocab, std::span<const std::string> items, bool frozen) {
  if (frozen) return intern(static_cast<const Vocabulary&>(vocab), items);
  SparseVector ids;
  ids.reserve(items.size());
  for (const auto& item : items) ids.push_back(vocab.add(item));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

SparseVector intern(const Vocabulary& vocab, std::span<const std::string> items) {
  SparseVector ids;
  ids.reserve(items.size());
  for (const auto& item : items)
    if (auto id = vocab.id_of(item); id != Vocabulary::invalid) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace dsel
