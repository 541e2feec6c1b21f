#include "spadev/aer.hpp"

#include <string>

#include "spadev/error.hpp"

namespace spadev {

namespace {
void check_field(const char* name, std::uint32_t value, std::uint32_t max) {
  if (value > max) {
    throw RangeError(std::string("AER field '") + name + "' = " + std::to_string(value) +
                     " exceeds " + std::to_string(max));
  }
}
}  // namespace

AerWord encode_aer(std::uint32_t row, std::uint32_t col, std::uint32_t feature_class,
                   std::uint32_t pulse_index) {
  check_field("row", row, kAerMaxRow);
  check_field("col", col, kAerMaxCol);
  check_field("feature_class", feature_class, kAerMaxFeature);
  check_field("pulse_index", pulse_index, kAerPulseModulus - 1);
  return (row << 25) | (col << 18) | (feature_class << 16) | pulse_index;
}

}  // namespace spadev
