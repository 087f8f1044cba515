#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "bhcav/dmrg.hpp"

// Layout (native little-endian): 8-byte magic, u32 version, then header,
// bond spaces, site tensors and the sweep log. Blocks are written as
// (rows, cols, column-major doubles).

namespace bhcav::mps {

namespace {

constexpr char kMagic[8] = {'B', 'H', 'C', 'M', 'P', 'S', '\0', '\1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void put(T v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void matrix(const Eigen::MatrixXd& m) {
    put<std::int64_t>(m.rows());
    put<std::int64_t>(m.cols());
    os_.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  template <class T>
  T get() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is_) throw std::runtime_error("truncated checkpoint");
    return v;
  }
  std::int64_t count(std::int64_t limit) {
    const auto n = get<std::int64_t>();
    if (n < 0 || n > limit) throw std::runtime_error("corrupt checkpoint");
    return n;
  }
  Eigen::MatrixXd matrix() {
    const auto r = count(1 << 24);
    const auto c = count(1 << 24);
    Eigen::MatrixXd m(r, c);
    is_.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!is_) throw std::runtime_error("truncated checkpoint");
    return m;
  }

 private:
  std::istream& is_;
};

}  // namespace

void save_checkpoint(const MpsState& psi, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint " + tmp);
    os.write(kMagic, sizeof kMagic);
    Writer w(os);
    w.put(kVersion);
    w.put<std::int32_t>(psi.sites);
    w.put<std::int32_t>(psi.particles);
    w.put<std::int32_t>(psi.n_max);
    w.put<std::int32_t>(psi.center);
    w.put<std::uint8_t>(psi.converged ? 1 : 0);
    w.put(psi.energy);
    for (const auto& b : psi.bonds) {
      w.put<std::int64_t>(b.sectors());
      for (int k = 0; k < b.sectors(); ++k) {
        w.put<std::int32_t>(b.charges[k]);
        w.put<std::int64_t>(b.dims[k]);
      }
    }
    for (const auto& t : psi.tensors) {
      w.put<std::int64_t>(static_cast<std::int64_t>(t.blocks.size()));
      for (const auto& blk : t.blocks) w.matrix(blk);
    }
    w.put<std::int64_t>(static_cast<std::int64_t>(psi.log.size()));
    for (const auto& rec : psi.log) {
      w.put<std::int32_t>(rec.sweep);
      w.put(rec.energy);
      w.put(rec.max_truncation);
      w.put<std::int32_t>(rec.max_bond);
      w.put<std::int32_t>(rec.chi);
    }
    if (!os) throw std::runtime_error("failed writing checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move checkpoint into place at " + path);
  }
}

MpsState load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(path + " is not an MPS checkpoint");
  }
  Reader r(is);
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  MpsState psi;
  psi.sites = r.get<std::int32_t>();
  psi.particles = r.get<std::int32_t>();
  psi.n_max = r.get<std::int32_t>();
  psi.center = r.get<std::int32_t>();
  psi.converged = r.get<std::uint8_t>() != 0;
  psi.energy = r.get<double>();
  if (psi.sites < 1 || psi.sites > 100000 || psi.n_max < 0 || psi.n_max > 255) {
    throw std::runtime_error("corrupt checkpoint header");
  }
  const int d = psi.phys_dim();
  psi.bonds.resize(psi.sites + 1);
  for (auto& b : psi.bonds) {
    const auto n = r.count(1 << 20);
    for (std::int64_t k = 0; k < n; ++k) {
      b.charges.push_back(r.get<std::int32_t>());
      b.dims.push_back(r.count(1 << 24));
    }
  }
  psi.tensors.resize(psi.sites);
  for (int i = 0; i < psi.sites; ++i) {
    auto& t = psi.tensors[i];
    t.phys_dim = d;
    const auto n = r.count(1 << 24);
    if (n != static_cast<std::int64_t>(psi.bonds[i].sectors()) * d) {
      throw std::runtime_error("checkpoint tensor does not match its bond");
    }
    t.blocks.reserve(n);
    for (std::int64_t k = 0; k < n; ++k) t.blocks.push_back(r.matrix());
  }
  const auto nlog = r.count(1 << 20);
  for (std::int64_t k = 0; k < nlog; ++k) {
    SweepRecord rec;
    rec.sweep = r.get<std::int32_t>();
    rec.energy = r.get<double>();
    rec.max_truncation = r.get<double>();
    rec.max_bond = r.get<std::int32_t>();
    rec.chi = r.get<std::int32_t>();
    psi.log.push_back(rec);
  }
  return psi;
}

}  // namespace bhcav::mps
