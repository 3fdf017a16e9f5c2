#include "lacache/cache.hpp"

#include <algorithm>
#include <cassert>

#include "lacache/errors.hpp"

namespace lacache {

CacheState::CacheState(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("cache capacity must be >= 1");
  entries_.reserve(capacity);
}

bool CacheState::contains(PageId page) const {
  return page.value < slot_.size() && slot_[page.value] != kAbsent;
}

const CacheEntry* CacheState::find(PageId page) const {
  if (!contains(page)) return nullptr;
  return &entries_[static_cast<std::size_t>(slot_[page.value])];
}

std::vector<PageId> CacheState::pages() const {
  std::vector<PageId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.page);
  std::sort(out.begin(), out.end());
  return out;
}

void CacheState::touch(const Request& request) {
  assert(contains(request.page));
  auto& e = entries_[static_cast<std::size_t>(slot_[request.page.value])];
  e.last_request = request.t;
  e.prediction = request.prediction;
}

void CacheState::insert(const Request& request) {
  assert(!contains(request.page) && !full());
  if (request.page.value >= slot_.size()) slot_.resize(request.page.value + 1, kAbsent);
  slot_[request.page.value] = static_cast<std::int32_t>(entries_.size());
  entries_.push_back(CacheEntry{request.page, request.t, request.prediction});
}

void CacheState::erase(PageId page) {
  assert(contains(page));
  const auto slot = static_cast<std::size_t>(slot_[page.value]);
  if (slot + 1 != entries_.size()) {
    entries_[slot] = entries_.back();
    slot_[entries_[slot].page.value] = static_cast<std::int32_t>(slot);
  }
  entries_.pop_back();
  slot_[page.value] = kAbsent;
}

}  // namespace lacache
