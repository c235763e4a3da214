#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "moseac/config.hpp"
#include "moseac/errors.hpp"
#include "moseac/num.hpp"
#include "moseac/reward.hpp"
#include "moseac/sac.hpp"

namespace moseac {

// Trained policy snapshot: the run config, the reward-adaptation state and
// all five networks. Optimizer moments are not serialized; checkpoints are
// for evaluation and inspection, not resuming.
struct Checkpoint {
  Config config;
  long step = 0;
  double alpha_m = 1.0;
  double log_temperature = 0.0;
  SacNets nets;

  double alpha_eps() const { return epsilon_from_m(alpha_m); }
};

namespace detail {

constexpr const char* kCkptMagic = "moseac-ckpt";
constexpr int kCkptVersion = 1;

inline void append_f32_le(std::string& out, double v) {
  const float f = static_cast<float>(v);
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  out.push_back(static_cast<char>(u & 0xff));
  out.push_back(static_cast<char>((u >> 8) & 0xff));
  out.push_back(static_cast<char>((u >> 16) & 0xff));
  out.push_back(static_cast<char>((u >> 24) & 0xff));
}

inline double read_f32_le(const unsigned char* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
  float f;
  std::memcpy(&f, &u, 4);
  return static_cast<double>(f);
}

struct TensorRef {
  std::string name;
  std::vector<double>* data;
  int rows, cols;
};

// Serialization order: actor, q1, q2, q1_target, q2_target; per layer w, b.
inline std::vector<TensorRef> tensor_table(SacNets& nets) {
  std::vector<TensorRef> refs;
  auto add_net = [&refs](const char* prefix, Mlp& net) {
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      auto& layer = net.layers[l];
      const std::string base = std::string(prefix) + ".l" + std::to_string(l);
      refs.push_back({base + ".w", &layer.w, layer.out, layer.in});
      refs.push_back({base + ".b", &layer.b, layer.out, 1});
    }
  };
  add_net("actor", nets.actor);
  add_net("q1", nets.q1);
  add_net("q2", nets.q2);
  add_net("q1_target", nets.q1_target);
  add_net("q2_target", nets.q2_target);
  return refs;
}

}  // namespace detail

inline void checkpoint_save(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::string head;
  head += std::string(detail::kCkptMagic) + " " + std::to_string(detail::kCkptVersion) + "\n";
  head += "step " + std::to_string(ckpt.step) + "\n";
  head += "variant " + ckpt.config.variant + "\n";
  head += "alpha_m " + fmt_double(ckpt.alpha_m) + "\n";
  head += "alpha_eps " + fmt_double(ckpt.alpha_eps()) + "\n";
  head += "log_temperature " + fmt_double(ckpt.log_temperature) + "\n";
  head += "config_begin\n";
  head += serialize_config(ckpt.config);
  head += "config_end\n";

  auto& nets = const_cast<Checkpoint&>(ckpt).nets;  // table needs mutable refs; save only reads
  const auto table = detail::tensor_table(nets);
  head += "tensors " + std::to_string(table.size()) + "\n";
  for (const auto& t : table) {
    head += "tensor " + t.name + " " + std::to_string(t.rows) + " " + std::to_string(t.cols) +
            "\n";
  }
  head += "data\n";

  std::string blob;
  std::size_t total = 0;
  for (const auto& t : table) total += t.data->size();
  blob.reserve(total * 4);
  for (const auto& t : table) {
    for (double v : *t.data) detail::append_f32_le(blob, v);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write checkpoint: " + path.string());
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw io_error("short write on checkpoint: " + path.string());
}

inline Checkpoint checkpoint_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read checkpoint: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string file = ss.str();

  const auto data_pos = file.find("\ndata\n");
  if (data_pos == std::string::npos) {
    throw checkpoint_truncated_error("checkpoint has no data section: " + path.string());
  }
  const std::string head = file.substr(0, data_pos + 1);
  const std::size_t blob_off = data_pos + 6;

  std::istringstream hs(head);
  std::string magic;
  int version = -1;
  hs >> magic >> version;
  if (magic != detail::kCkptMagic) {
    throw checkpoint_version_error("not a checkpoint file: " + path.string());
  }
  if (version != detail::kCkptVersion) {
    throw checkpoint_version_error("unsupported checkpoint version " +
                                   std::to_string(version));
  }
  hs.ignore(std::numeric_limits<std::streamsize>::max(), '\n');

  Checkpoint ckpt;
  double alpha_eps_stored = std::numeric_limits<double>::quiet_NaN();
  std::string config_text;
  std::vector<std::array<long, 2>> shapes;  // rows, cols in table order
  std::size_t declared_tensors = 0;
  std::string line;
  bool in_config = false;
  while (std::getline(hs, line)) {
    if (line == "config_begin") {
      in_config = true;
      continue;
    }
    if (line == "config_end") {
      in_config = false;
      continue;
    }
    if (in_config) {
      config_text += line + "\n";
      continue;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "step") {
      ls >> ckpt.step;
    } else if (key == "variant") {
      std::string v;
      ls >> v;  // informational; the embedded config is authoritative
    } else if (key == "alpha_m") {
      std::string v;
      ls >> v;
      ckpt.alpha_m = parse_double(v, "checkpoint alpha_m");
    } else if (key == "alpha_eps") {
      std::string v;
      ls >> v;
      alpha_eps_stored = parse_double(v, "checkpoint alpha_eps");
    } else if (key == "log_temperature") {
      std::string v;
      ls >> v;
      ckpt.log_temperature = parse_double(v, "checkpoint log_temperature");
    } else if (key == "tensors") {
      ls >> declared_tensors;
    } else if (key == "tensor") {
      std::string name;
      long rows = 0, cols = 0;
      ls >> name >> rows >> cols;
      if (rows <= 0 || cols <= 0) {
        throw checkpoint_shape_error("bad tensor shape for " + name);
      }
      shapes.push_back({rows, cols});
    } else if (key.empty()) {
      continue;
    } else {
      throw checkpoint_error("unknown checkpoint key: " + key);
    }
  }
  if (config_text.empty()) throw checkpoint_error("checkpoint missing embedded config");
  ckpt.config = parse_config_text(config_text, path.string() + "#config");
  if (shapes.size() != declared_tensors) {
    throw checkpoint_shape_error("tensor table length mismatch");
  }

  // Rebuild networks from the config, then overlay the stored tensors.
  ckpt.nets = make_sac_nets(ckpt.config.sac_config(), /*seed=*/0);
  ckpt.nets.log_temperature = ckpt.log_temperature;
  auto table = detail::tensor_table(ckpt.nets);
  if (table.size() != shapes.size()) {
    throw checkpoint_shape_error("checkpoint holds " + std::to_string(shapes.size()) +
                                 " tensors, config implies " + std::to_string(table.size()));
  }
  std::size_t expect = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::size_t n = static_cast<std::size_t>(shapes[i][0]) * shapes[i][1];
    if (n != table[i].data->size()) {
      throw checkpoint_shape_error("tensor " + table[i].name + " shape mismatch");
    }
    expect += n;
  }
  if (file.size() - blob_off < expect * 4) {
    throw checkpoint_truncated_error("checkpoint data truncated: " + path.string());
  }
  if (file.size() - blob_off > expect * 4) {
    throw checkpoint_truncated_error("checkpoint has trailing bytes: " + path.string());
  }
  const unsigned char* p = reinterpret_cast<const unsigned char*>(file.data()) + blob_off;
  for (auto& t : table) {
    for (double& v : *t.data) {
      v = detail::read_f32_le(p);
      p += 4;
    }
  }
  if (!std::isnan(alpha_eps_stored) && alpha_eps_stored != ckpt.alpha_eps()) {
    throw checkpoint_error("checkpoint alpha_eps inconsistent with alpha_m");
  }
  return ckpt;
}

}  // namespace moseac
