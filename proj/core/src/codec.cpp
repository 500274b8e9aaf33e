#include "clab/codec.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace clab {

namespace mp = boost::multiprecision;

void BitString::push_bit(bool bit) {
  const std::size_t byte = size_ / 8;
  if (byte == bytes_.size()) bytes_.push_back(0);
  if (bit) bytes_[byte] |= static_cast<std::uint8_t>(0x80u >> (size_ % 8));
  ++size_;
}

void BitString::append(const BitString& other) {
  if (size_ % 8 == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    size_ += other.size_;
    return;
  }
  for (std::size_t i = 0; i < other.size_; ++i) push_bit(other.bit(i));
}

bool BitString::bit(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("BitString::bit");
  return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

BitString BitString::parse(std::string_view bits) {
  BitString out;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("BitString::parse: expected only 0/1");
    out.push_bit(c == '1');
  }
  return out;
}

BitString BitString::from_packed(std::vector<std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) throw std::invalid_argument("BitString::from_packed: bit count exceeds data");
  BitString out;
  out.bytes_ = std::move(bytes);
  out.bytes_.resize((bit_count + 7) / 8);
  out.size_ = bit_count;
  if (bit_count % 8 != 0 && !out.bytes_.empty()) {
    // clear padding so equality is well-defined
    out.bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - bit_count % 8));
  }
  return out;
}

bool BitString::operator==(const BitString& other) const {
  return size_ == other.size_ && bytes_ == other.bytes_;
}

bool BitReader::read_bit() {
  if (pos_ >= bits_->size()) throw DecodeError("unexpected end of stream", pos_);
  return bits_->bit(pos_++);
}

double Rational::value() const {
  if (num == 0) return 0.0;
  return sign * mp::cpp_rational(num, den).convert_to<double>();
}

namespace {

std::size_t bitlen(const BigInt& n) {
  return n == 0 ? 0 : mp::msb(n) + 1;
}

void append_int_code(BitString& out, const BigInt& n) {
  if (n < 0) throw std::invalid_argument("encode_int: negative value");
  if (n == 0) {
    // zero-numerator convention: length field 1, payload bit 0
    out.push_bit(true);
    out.push_bit(false);
    out.push_bit(false);
    return;
  }
  const std::size_t len = bitlen(n);
  for (std::size_t i = 0; i < len; ++i) out.push_bit(true);
  out.push_bit(false);
  for (std::size_t i = len; i-- > 0;) out.push_bit(mp::bit_test(n, static_cast<unsigned>(i)));
}

std::size_t int_code_length(const BigInt& n) {
  return n == 0 ? 3 : 2 * bitlen(n) + 1;
}

BigInt read_int_code(BitReader& r) {
  const std::size_t start = r.position();
  std::size_t len = 0;
  while (r.read_bit()) ++len;
  if (len == 0) throw DecodeError("integer code with empty length field", start);
  BigInt value = 0;
  for (std::size_t i = 0; i < len; ++i) {
    value <<= 1;
    if (r.read_bit()) value |= 1;
  }
  if (value == 0 && len != 1) throw DecodeError("non-canonical zero code", start);
  if (value != 0 && bitlen(value) != len) throw DecodeError("integer code with leading zero", start);
  return value;
}

}  // namespace

BitString encode_int(const BigInt& n) {
  if (n <= 0) throw std::invalid_argument("encode_int requires n >= 1");
  BitString out;
  append_int_code(out, n);
  return out;
}

BitString encode_int(std::uint64_t n) { return encode_int(BigInt(n)); }

std::size_t encoded_int_length(const BigInt& n) {
  if (n <= 0) throw std::invalid_argument("encoded_int_length requires n >= 1");
  return int_code_length(n);
}

BitString encode_rational(const Rational& w) {
  BitString out;
  out.push_bit(w.sign >= 0);
  append_int_code(out, w.num);
  append_int_code(out, w.num == 0 ? BigInt(1) : w.den);
  return out;
}

std::size_t encoded_rational_length(const Rational& w) {
  return 1 + int_code_length(w.num) + int_code_length(w.num == 0 ? BigInt(1) : w.den);
}

Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite input");
  if (max_den < 1) throw std::invalid_argument("rationalize: max_den must be >= 1");

  Rational out;
  out.sign = std::signbit(x) ? -1 : +1;
  const double ax = std::fabs(x);
  if (ax == 0.0) return out;  // +0/1

  // exact decomposition: ax = mant * 2^e2 with mant a 53-bit integer
  int exp = 0;
  const double frac = std::frexp(ax, &exp);
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int e2 = exp - 53;

  BigInt num = mant;
  BigInt den = 1;
  if (e2 >= 0)
    num <<= e2;
  else
    den <<= -e2;

  // continued-fraction convergents p/q of num/den
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  BigInt n = num, d = den;
  const BigInt bound = max_den;
  while (true) {
    const BigInt a = n / d;
    const BigInt q2 = q0 + a * q1;
    if (q2 > bound) break;
    const BigInt p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const BigInt rem = n - a * d;
    n = d;
    d = rem;
    if (d == 0) {  // exact
      out.num = p1;
      out.den = q1;
      return out;
    }
  }

  // two candidates: last convergent p1/q1 and best semiconvergent
  const BigInt k = (bound - q0) / q1;
  const BigInt cand_p = p0 + k * p1;
  const BigInt cand_q = q0 + k * q1;

  // |num/den - p/q| comparison, cross-multiplied (exact)
  const BigInt err_conv = mp::abs(num * q1 - p1 * den) * cand_q;
  const BigInt err_semi = mp::abs(num * cand_q - cand_p * den) * q1;

  bool take_semi;
  if (err_semi != err_conv) {
    take_semi = err_semi < err_conv;
  } else if (cand_q != q1) {
    take_semi = cand_q < q1;  // tie: smaller denominator
  } else {
    take_semi = cand_p < p1;  // then smaller numerator
  }

  if (take_semi) {
    out.num = cand_p;
    out.den = cand_q;
  } else {
    out.num = p1;
    out.den = q1;
  }
  if (out.num == 0) {
    out.den = 1;
    if (out.sign < 0) out.sign = +1;  // canonical +0/1
  } else {
    const BigInt g = mp::gcd(out.num, out.den);
    out.num /= g;
    out.den /= g;
  }
  return out;
}

BitString encode_network(const LstmParams& params, std::int64_t max_den) {
  check_shapes(params);
  BitString out;
  append_int_code(out, BigInt(params.hidden_size));
  const ParamVector v = flatten(params);
  for (double w : v.values) out.append(encode_rational(rationalize(w, max_den)));
  return out;
}

std::int64_t description_length(const LstmParams& params, std::int64_t max_den) {
  const ParamVector v = flatten(params);
  return description_length(v.values, params.hidden_size, max_den);
}

std::int64_t description_length(std::span<const double> values, int hidden_size, std::int64_t max_den) {
  if (values.size() != param_count(hidden_size))
    throw std::invalid_argument("description_length: vector length inconsistent with hidden_size");
  std::int64_t bits = static_cast<std::int64_t>(int_code_length(BigInt(hidden_size)));
  for (double w : values) bits += static_cast<std::int64_t>(encoded_rational_length(rationalize(w, max_den)));
  return bits;
}

LstmParams decode_network(const BitString& bits) {
  BitReader r(bits);
  const BigInt h_big = read_int_code(r);
  if (h_big < 1 || h_big > 4096) throw DecodeError("implausible hidden size", 0);
  const int h = h_big.convert_to<int>();

  std::vector<double> values;
  values.reserve(param_count(h));
  for (std::size_t i = 0; i < param_count(h); ++i) {
    const std::size_t at = r.position();
    Rational w;
    w.sign = r.read_bit() ? +1 : -1;
    w.num = read_int_code(r);
    w.den = read_int_code(r);
    if (w.den == 0) throw DecodeError("zero denominator", at);
    values.push_back(w.value());
  }
  if (r.remaining() != 0) throw DecodeError("trailing bits after network", r.position());
  return unflatten(values, h);
}

void save_bitstream(const BitString& bits, const std::filesystem::path& file) {
  {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    const auto& bytes = bits.packed();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + file.string());
  }
  std::ofstream len(file.string() + ".len");
  if (!len) throw std::runtime_error("cannot open for writing: " + file.string() + ".len");
  len << bits.size() << "\n";
}

BitString load_bitstream(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::ifstream len(file.string() + ".len");
  if (!len) throw std::runtime_error("missing bit-length sidecar: " + file.string() + ".len");
  std::size_t bit_count = 0;
  len >> bit_count;
  return BitString::from_packed(std::move(bytes), bit_count);
}

}  // namespace clab
