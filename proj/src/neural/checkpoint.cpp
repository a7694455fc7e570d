#include "marlin/neural/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace marlin {

namespace {

constexpr char kMagic[8] = {'M', 'R', 'L', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_tensor(std::ostream& out, const std::string& name,
                  const std::vector<int>& shape, const std::vector<double>& data) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(shape.size()));
    for (int d : shape) write_u32(out, static_cast<std::uint32_t>(d));
    write_u32(out, static_cast<std::uint32_t>(data.size()));
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
}

struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> data;
};

Tensor read_tensor(std::istream& in) {
    Tensor t;
    const auto name_len = read_u32(in);
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    const auto ndims = read_u32(in);
    t.shape.resize(ndims);
    for (auto& d : t.shape) d = static_cast<int>(read_u32(in));
    const auto count = read_u32(in);
    t.data.resize(count);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor " + t.name);
    return t;
}

void restore(Mlp& net, const Tensor& t) {
    if (t.shape != net.widths() || t.data.size() != net.params().size())
        throw std::runtime_error("checkpoint: shape mismatch for " + t.name);
    net.params() = t.data;
}

}  // namespace

void save_checkpoint(const SacAgent& agent, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    const bool film = agent.config().use_film;
    write_u32(out, film ? 7 : 6);
    write_tensor(out, "actor", agent.actor().widths(), agent.actor().params());
    if (film)
        write_tensor(out, "film", agent.film().net().widths(),
                     agent.film().net().params());
    write_tensor(out, "critic1", agent.critic1().widths(), agent.critic1().params());
    write_tensor(out, "critic2", agent.critic2().widths(), agent.critic2().params());
    write_tensor(out, "target1", agent.target1().widths(), agent.target1().params());
    write_tensor(out, "target2", agent.target2().widths(), agent.target2().params());
    write_tensor(out, "log_alpha", {1}, {agent.log_alpha()});
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

void load_checkpoint(SacAgent& agent, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kMagic))
        throw std::runtime_error("not a checkpoint file: " + path);
    const auto version = read_u32(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " +
                                 std::to_string(version));
    const auto count = read_u32(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        Tensor t = read_tensor(in);
        if (t.name == "actor")
            restore(agent.actor(), t);
        else if (t.name == "film")
            restore(agent.film().net(), t);
        else if (t.name == "critic1")
            restore(agent.critic1(), t);
        else if (t.name == "critic2")
            restore(agent.critic2(), t);
        else if (t.name == "target1")
            restore(agent.target1(), t);
        else if (t.name == "target2")
            restore(agent.target2(), t);
        else if (t.name == "log_alpha")
            agent.log_alpha() = t.data.at(0);
        else
            throw std::runtime_error("checkpoint: unknown tensor " + t.name);
    }
}

}  // namespace marlin
