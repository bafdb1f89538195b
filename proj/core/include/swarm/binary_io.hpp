#pragma once

#include "swarm/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

namespace swarm::binio {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
void put_array(std::ostream& out, const T* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
T get(std::istream& in, const char* section) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) throw FormatError(section, "unexpected end of file");
  return value;
}

template <typename T>
void get_array(std::istream& in, T* data, std::size_t n, const char* section) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(T)))) {
    throw FormatError(section, "unexpected end of file");
  }
}

inline void expect_magic(std::istream& in, const char (&magic)[9], const char* section) {
  char buf[8];
  if (!in.read(buf, 8)) throw FormatError(section, "unexpected end of file");
  if (std::memcmp(buf, magic, 8) != 0) throw FormatError(section, std::string("bad magic, expected ") + magic);
}

}  // namespace swarm::binio
