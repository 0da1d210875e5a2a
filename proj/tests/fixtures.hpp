#pragma once

#include "pmc/kernel.hpp"

namespace fixtures {

inline const pmc::FinObject& coin() {
  static const pmc::FinObject x = pmc::FinObject::atomic("Coin", {"H", "T"});
  return x;
}

inline const pmc::FinObject& bit() {
  static const pmc::FinObject x = pmc::FinObject::atomic("Bit", {"0", "1"});
  return x;
}

/// Fair prior on Coin.
inline pmc::SubKernel prior() { return {pmc::FinObject::unit(), coin(), {0.5, 0.5}}; }

/// Noisy sensor Coin -> Bit: H reads 0 with 0.9, T reads 1 with 0.8.
inline pmc::SubKernel sensor() { return {coin(), bit(), {0.9, 0.1, 0.2, 0.8}}; }

inline constexpr const char* kCoinModel = R"(
object Coin = { H, T }
object Bit = { 0, 1 }
state p : Coin = { H : 0.5, T : 0.5 }
kernel f : Coin -> Bit = {
  H -> { 0 : 0.9, 1 : 0.1 },
  T -> { 0 : 0.2, 1 : 0.8 }
}
)";

}  // namespace fixtures
