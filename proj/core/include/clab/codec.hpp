#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "clab/lstm.hpp"

namespace clab {

using BigInt = boost::multiprecision::cpp_int;

/// Growable bit sequence, packed MSB-first. Concatenation-friendly: this is
/// the unit the prefix-free codes are spliced into.
class BitString {
 public:
  BitString() = default;

  void push_bit(bool bit);
  void append(const BitString& other);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool bit(std::size_t i) const;

  std::string to_string() const;                    // e.g. "11010"
  static BitString parse(std::string_view bits);    // inverse of to_string

  /// Packed bytes, MSB-first, final partial byte zero-padded.
  const std::vector<std::uint8_t>& packed() const { return bytes_; }
  static BitString from_packed(std::vector<std::uint8_t> bytes, std::size_t bit_count);

  bool operator==(const BitString& other) const;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

/// Sequential reader over a BitString; throws DecodeError past the end.
class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(&bits) {}
  bool read_bit();
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_->size() - pos_; }

 private:
  const BitString* bits_;
  std::size_t pos_ = 0;
};

class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t bit_offset)
      : std::runtime_error(what + " (bit offset " + std::to_string(bit_offset) + ")"), bit_offset_(bit_offset) {}
  std::size_t bit_offset() const { return bit_offset_; }

 private:
  std::size_t bit_offset_;
};

/// Signed rational in lowest terms; zero is canonically +0/1.
struct Rational {
  int sign = +1;   // +1 or -1
  BigInt num = 0;  // >= 0
  BigInt den = 1;  // >= 1

  double value() const;
  bool operator==(const Rational&) const = default;
};

/// Prefix-free integer code: unary(bitlen(n)) ++ "0" ++ binary(n), n >= 1.
/// Code length is exactly 2*bitlen(n) + 1.
BitString encode_int(const BigInt& n);
BitString encode_int(std::uint64_t n);
std::size_t encoded_int_length(const BigInt& n);

/// Sign bit ("1" positive, "0" negative) ++ code(num) ++ code(den).
/// A zero numerator uses the three-bit code "100" so streams stay decodable.
BitString encode_rational(const Rational& w);
std::size_t encoded_rational_length(const Rational& w);

/// Closest rational to x with denominator <= max_den, computed exactly via
/// continued-fraction best approximations. Ties prefer the smaller
/// denominator, then the smaller numerator. Throws on non-finite x.
Rational rationalize(double x, std::int64_t max_den);

/// Network stream: code(hidden_size) ++ rational code of every parameter in
/// canonical ParamVector order (biases included).
BitString encode_network(const LstmParams& params, std::int64_t max_den = 1000);

/// |H|: length in bits of encode_network, without materializing the stream.
std::int64_t description_length(const LstmParams& params, std::int64_t max_den = 1000);
std::int64_t description_length(std::span<const double> values, int hidden_size, std::int64_t max_den = 1000);

/// Inverse of encode_network. Weights come back as double(num/den).
/// Throws DecodeError with the offending bit offset on malformed input.
LstmParams decode_network(const BitString& bits);

/// Bitstream file: packed bytes, plus a one-line sidecar "<file>.len" holding
/// the true bit length.
void save_bitstream(const BitString& bits, const std::filesystem::path& file);
BitString load_bitstream(const std::filesystem::path& file);

}  // namespace clab
