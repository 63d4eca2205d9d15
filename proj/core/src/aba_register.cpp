#include "abakit/aba_register.hpp"

#include <algorithm>

namespace abakit {

AbaLayout::AbaLayout(std::size_t n, unsigned value_bits)
    : n_(n), value_bits_(value_bits), pid_bits_(bits_for(n + 1)), seq_bits_(bits_for(2 * n + 3)) {
  if (n == 0) throw ConfigError("ABA register needs n >= 1");
  if (value_bits == 0 || value_bits > 62) throw ConfigError("value width must be in 1..62 bits");
}

SequenceRecycler::SequenceRecycler(std::size_t n, AbaVariant variant)
    : n_(n),
      variant_(variant),
      domain_(variant == AbaVariant::Faithful ? static_cast<SeqNo>(2 * n + 2)
                                              : static_cast<SeqNo>(n + 1)),
      used_(n + 1, std::nullopt),
      na_(n, std::nullopt),
      excluded_(domain_, false) {}

SeqNo SequenceRecycler::next(ProcessId self, const AnnouncePair& seen) {
  // Slot c is replaced wholesale: keep (c, s_r) only if the announcement is ours.
  na_[cursor_] = (seen.r == self) ? seen.s : std::nullopt;
  cursor_ = (cursor_ + 1) % n_;

  std::fill(excluded_.begin(), excluded_.end(), false);
  auto exclude = [&](const std::optional<SeqNo>& s) {
    if (s && *s < domain_) excluded_[*s] = true;
  };
  std::for_each(na_.begin(), na_.end(), exclude);
  std::for_each(used_.begin(), used_.end(), exclude);

  const auto free = std::find(excluded_.begin(), excluded_.end(), false);
  SeqNo s = 0;
  if (free != excluded_.end()) {
    s = static_cast<SeqNo>(free - excluded_.begin());
  } else if (variant_ == AbaVariant::ShrunkSequenceDomain) {
    // Every value is taken; wrap around to the least recently used one.
    const auto oldest = std::find_if(used_.begin(), used_.end(),
                                     [](const std::optional<SeqNo>& e) { return e.has_value(); });
    s = **oldest;
  } else {
    throw InvariantViolation("no free sequence number");
  }

  used_.push_back(s);
  used_.pop_front();
  return s;
}

}  // namespace abakit
