#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qecho/errors.hpp"
#include "qecho/model.hpp"

namespace qecho {

// Binary model container, little-endian, in field order:
//   bytes 0..7   magic "QEKOOPM1"
//   u32          format version (1)
//   u32          variant (0 = BE, 1 = BERG)
//   u32          lifted dimension z (5)
//   u32          reserved (0)
//   f64          dt
//   u64          number of trained detunings (0 for BE)
//   u64          number of B_delta matrices (1 for BE, = detunings for BERG)
//   f64[...]     trained detunings, ascending
//   f64[z*z]     K0, row-major
//   f64[z*z]     B_omega, row-major
//   f64[z*z]...  each B_delta, row-major
//   f64[4*z]     projector, row-major
// Save and load round-trip bit-exactly.
inline constexpr char kModelMagic[8] = {'Q', 'E', 'K', 'O', 'O', 'P', 'M', '1'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

namespace detail {

inline void write_bytes(std::ofstream& out, const void* data, std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

inline void read_bytes(std::ifstream& in, void* data, std::size_t size,
                       const std::string& what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (in.gcount() != static_cast<std::streamsize>(size)) {
    throw IoError("model file truncated while reading " + what);
  }
}

template <class T>
void write_pod(std::ofstream& out, const T& value) {
  write_bytes(out, &value, sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in, const std::string& what) {
  T value;
  read_bytes(in, &value, sizeof(T), what);
  return value;
}

inline void write_matrix_rows(std::ofstream& out, const double* data,
                              std::size_t rows, std::size_t cols) {
  // Matrices are stored column-major in memory; serialize row-major.
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      write_pod(out, data[c * rows + r]);
    }
  }
}

inline void read_matrix_rows(std::ifstream& in, double* data, std::size_t rows,
                             std::size_t cols, const std::string& what) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      data[c * rows + r] = read_pod<double>(in, what);
    }
  }
}

}  // namespace detail

inline void save_model(const KoopmanModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file for writing: " + path.string());

  detail::write_bytes(out, kModelMagic, sizeof(kModelMagic));
  detail::write_pod(out, kModelFormatVersion);
  detail::write_pod(out, static_cast<std::uint32_t>(model.variant));
  detail::write_pod(out, static_cast<std::uint32_t>(KoopmanModel::z));
  detail::write_pod(out, std::uint32_t{0});
  detail::write_pod(out, model.dt);
  detail::write_pod(out, static_cast<std::uint64_t>(model.berg_detunings.size()));
  detail::write_pod(out, static_cast<std::uint64_t>(model.B_delta.size()));
  for (const double d : model.berg_detunings) detail::write_pod(out, d);
  detail::write_matrix_rows(out, model.K0.data(), 5, 5);
  detail::write_matrix_rows(out, model.B_omega.data(), 5, 5);
  for (const Matrix5d& b : model.B_delta) {
    detail::write_matrix_rows(out, b.data(), 5, 5);
  }
  detail::write_matrix_rows(out, model.projector.data(), 4, 5);
  out.flush();
  if (!out) throw IoError("failed writing model file: " + path.string());
}

inline KoopmanModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path.string());

  char magic[8];
  detail::read_bytes(in, magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
    throw IoError("not a model file (bad magic): " + path.string());
  }
  const auto version = detail::read_pod<std::uint32_t>(in, "version");
  if (version != kModelFormatVersion) {
    throw IoError("unsupported model format version " + std::to_string(version));
  }
  const auto variant_raw = detail::read_pod<std::uint32_t>(in, "variant");
  if (variant_raw > 1) throw IoError("unknown model variant tag");
  const auto z = detail::read_pod<std::uint32_t>(in, "lifted dimension");
  if (z != KoopmanModel::z) throw IoError("unexpected lifted dimension");
  (void)detail::read_pod<std::uint32_t>(in, "reserved");

  KoopmanModel model;
  model.variant = static_cast<ModelVariant>(variant_raw);
  model.dt = detail::read_pod<double>(in, "dt");
  if (!(model.dt > 0.0)) throw IoError("model dt must be positive");
  const auto n_detunings = detail::read_pod<std::uint64_t>(in, "detuning count");
  const auto n_b_delta = detail::read_pod<std::uint64_t>(in, "operator count");
  if (model.variant == ModelVariant::be) {
    if (n_detunings != 0 || n_b_delta != 1) {
      throw IoError("BE model must store no detunings and one delta operator");
    }
  } else {
    if (n_detunings < 2 || n_b_delta != n_detunings) {
      throw IoError("BERG model must store one operator per trained detuning");
    }
  }
  model.berg_detunings.resize(n_detunings);
  for (std::uint64_t i = 0; i < n_detunings; ++i) {
    model.berg_detunings[i] = detail::read_pod<double>(in, "detuning");
    if (i > 0 && !(model.berg_detunings[i] > model.berg_detunings[i - 1])) {
      throw IoError("model detunings must be strictly increasing");
    }
  }
  detail::read_matrix_rows(in, model.K0.data(), 5, 5, "K0");
  detail::read_matrix_rows(in, model.B_omega.data(), 5, 5, "B_omega");
  model.B_delta.resize(n_b_delta);
  for (std::uint64_t i = 0; i < n_b_delta; ++i) {
    detail::read_matrix_rows(in, model.B_delta[i].data(), 5, 5, "B_delta");
  }
  detail::read_matrix_rows(in, model.projector.data(), 4, 5, "projector");

  char extra;
  in.read(&extra, 1);
  if (in.gcount() != 0) throw IoError("model file has trailing bytes");
  return model;
}

}  // namespace qecho
