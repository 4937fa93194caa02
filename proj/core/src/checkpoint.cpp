// Copyright 2026 The getda Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "getda/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "getda/error.hpp"

namespace getda {
namespace {

constexpr char kMagic[8] = {'G', 'E', 'T', 'D', 'A', 'C', 'K', '1'};
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("checkpoint: truncated file");
  return v;
}

void put_matrix(std::ostream& out, const Matrix& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix get_matrix(std::istream& in) {
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows > kMaxElements || cols > kMaxElements || (cols > 0 && rows > kMaxElements / cols)) {
    throw IoError("checkpoint: implausible matrix shape");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw IoError("checkpoint: truncated file");
  return m;
}

void put_vector(std::ostream& out, const Vector& v) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Vector get_vector(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  if (n > kMaxElements) throw IoError("checkpoint: implausible vector size");
  Vector v(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw IoError("checkpoint: truncated file");
  return v;
}

void put_layer(std::ostream& out, const Layer& l) {
  put_matrix(out, l.weight);
  put_vector(out, l.bias);
}

Layer get_layer(std::istream& in) {
  Layer l;
  l.weight = get_matrix(in);
  l.bias = get_vector(in);
  return l;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const TrainerState& s = ckpt.state;
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, ckpt.config_hash.size());
  out.write(ckpt.config_hash.data(), static_cast<std::streamsize>(ckpt.config_hash.size()));
  put<std::int64_t>(out, s.epoch);

  put<std::uint64_t>(out, s.params.extractor.size());
  for (const Layer& l : s.params.extractor) put_layer(out, l);
  put_layer(out, s.params.head);

  const SgdConfig& c = s.sgd.config;
  for (double v : {c.momentum, c.weight_decay, c.feature_lr, c.classifier_lr, c.omega, c.alpha}) put(out, v);
  put<std::int64_t>(out, s.sgd.iteration);
  put<std::int64_t>(out, s.sgd.max_iterations);
  put<std::uint64_t>(out, s.sgd.velocity.size());
  for (const auto& v : s.sgd.velocity) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }

  put_vector(out, s.prior);
  put_matrix(out, s.bank_prototypes);
  put_matrix(out, s.embedding_prototypes);
  if (!out) throw IoError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError("checkpoint: bad magic");
  Checkpoint ckpt;
  const auto hash_len = get<std::uint64_t>(in);
  if (hash_len > 1024) throw IoError("checkpoint: implausible hash length");
  ckpt.config_hash.resize(hash_len);
  in.read(ckpt.config_hash.data(), static_cast<std::streamsize>(hash_len));
  TrainerState& s = ckpt.state;
  s.epoch = static_cast<int>(get<std::int64_t>(in));

  const auto layers = get<std::uint64_t>(in);
  if (layers > 1024) throw IoError("checkpoint: implausible layer count");
  for (std::uint64_t i = 0; i < layers; ++i) s.params.extractor.push_back(get_layer(in));
  s.params.head = get_layer(in);

  SgdConfig& c = s.sgd.config;
  for (double* v : {&c.momentum, &c.weight_decay, &c.feature_lr, &c.classifier_lr, &c.omega, &c.alpha}) {
    *v = get<double>(in);
  }
  s.sgd.iteration = get<std::int64_t>(in);
  s.sgd.max_iterations = get<std::int64_t>(in);
  const auto slots = get<std::uint64_t>(in);
  if (slots > 4096) throw IoError("checkpoint: implausible slot count");
  s.sgd.velocity.resize(slots);
  for (auto& v : s.sgd.velocity) {
    const auto n = get<std::uint64_t>(in);
    if (n > kMaxElements) throw IoError("checkpoint: implausible velocity size");
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw IoError("checkpoint: truncated file");
  }

  s.prior = get_vector(in);
  s.bank_prototypes = get_matrix(in);
  s.embedding_prototypes = get_matrix(in);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot open " + tmp.string());
    write_checkpoint(out, ckpt);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("checkpoint: cannot rename to " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace getda
