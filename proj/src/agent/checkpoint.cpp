#include "sizer/agent/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "sizer/util/error.hpp"

namespace sizer::agent {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic{'G', 'C', 'N', 'S', 'Z', 'C', 'K', '\0'};

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}
    template <typename T>
    void put(T v) {
        os_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void put_string(const std::string& s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void put_matrix(const nn::Matrix& m) {
        put<std::uint64_t>(m.rows());
        put<std::uint64_t>(m.cols());
        os_.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    }

private:
    std::ostream& os_;
};

class Reader {
public:
    Reader(std::istream& is, std::string origin) : is_(is), origin_(std::move(origin)) {}
    template <typename T>
    T get() {
        T v{};
        read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    std::string get_string() {
        const auto n = get<std::uint32_t>();
        if (n > 4096) {
            fail("implausible name length");
        }
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }
    nn::Matrix get_matrix() {
        const auto r = get<std::uint64_t>();
        const auto c = get<std::uint64_t>();
        if (r > (1u << 20) || c > (1u << 20)) {
            fail("implausible matrix shape");
        }
        nn::Matrix m(r, c);
        read(reinterpret_cast<char*>(m.data()), m.size() * sizeof(double));
        return m;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("checkpoint " + origin_ + ": " + what);
    }

private:
    void read(char* dst, std::size_t n) {
        is_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n) {
            fail("truncated file");
        }
    }
    std::istream& is_;
    std::string origin_;
};

std::uint8_t kind_mask_of(const circuit::CircuitTopology& t) {
    std::uint8_t mask = 0;
    for (const auto& c : t.components()) {
        mask |= static_cast<std::uint8_t>(1u << circuit::kind_index(c.kind));
    }
    return mask;
}

void read_params(Reader& r, std::vector<nn::Parameter*> params) {
    const auto count = r.get<std::uint64_t>();
    if (count != params.size()) {
        r.fail("expected " + std::to_string(params.size()) + " tensors, found " + std::to_string(count));
    }
    for (auto* p : params) {
        const std::string name = r.get_string();
        nn::Matrix m = r.get_matrix();
        if (name != p->name || !m.same_shape(p->value)) {
            r.fail("tensor '" + name + "' does not match '" + p->name + "'");
        }
        p->value = std::move(m);
        p->zero_grad();
    }
}

void write_params(Writer& w, const std::vector<nn::Parameter*>& params) {
    w.put<std::uint64_t>(params.size());
    for (const auto* p : params) {
        w.put_string(p->name);
        w.put_matrix(p->value);
    }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, Agent& agent, const circuit::CircuitTopology& source) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw ConfigError("cannot write checkpoint " + path.string());
    }
    Writer w(os);
    os.write(kMagic.data(), kMagic.size());
    w.put<std::uint32_t>(kCheckpointVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(agent.config().encoding));
    w.put<std::uint8_t>(agent.config().skip_aggregation ? 1 : 0);
    const NetworkDims& d = agent.actor().dims();
    w.put<std::uint64_t>(d.state_dim);
    w.put<std::uint64_t>(d.hidden);
    w.put<std::uint64_t>(d.action_hidden);
    w.put<std::uint64_t>(d.gcn_layers);
    w.put<std::uint8_t>(kind_mask_of(source));
    w.put<std::uint64_t>(source.size());
    w.put_string(source.name());
    write_params(w, agent.actor().parameters());
    write_params(w, agent.critic().parameters());
    if (!os) {
        throw ConfigError("failed writing checkpoint " + path.string());
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ConfigError("cannot open checkpoint " + path.string());
    }
    Reader r(is, path.string());
    std::array<char, 8> magic{};
    for (auto& ch : magic) {
        ch = r.get<char>();
    }
    if (magic != kMagic) {
        r.fail("not a sizing-agent checkpoint");
    }
    const auto version = r.get<std::uint32_t>();
    if (version != kCheckpointVersion) {
        r.fail("unsupported version " + std::to_string(version));
    }
    Checkpoint ck;
    const auto enc = r.get<std::uint8_t>();
    if (enc > 1) {
        r.fail("unknown encoding mode");
    }
    ck.info.encoding = static_cast<circuit::EncodingMode>(enc);
    ck.info.skip_aggregation = r.get<std::uint8_t>() != 0;
    ck.info.dims.state_dim = r.get<std::uint64_t>();
    ck.info.dims.hidden = r.get<std::uint64_t>();
    ck.info.dims.action_hidden = r.get<std::uint64_t>();
    ck.info.dims.gcn_layers = r.get<std::uint64_t>();
    if (ck.info.dims.gcn_layers > 64 || ck.info.dims.hidden > 4096 || ck.info.dims.action_hidden > 4096 ||
        ck.info.dims.state_dim > 1u << 16) {
        r.fail("implausible network dimensions");
    }
    ck.info.kind_mask = r.get<std::uint8_t>();
    ck.info.source_nodes = r.get<std::uint64_t>();
    ck.info.source_name = r.get_string();

    Rng scratch(0);
    ck.actor = ActorNetwork(ck.info.dims, scratch);
    ck.critic = CriticNetwork(ck.info.dims, scratch);
    read_params(r, ck.actor.parameters());
    read_params(r, ck.critic.parameters());
    if (is.peek() != std::char_traits<char>::eof()) {
        r.fail("trailing bytes");
    }
    return ck;
}

void check_compatible(const CheckpointInfo& info, const circuit::CircuitTopology& target,
                      circuit::EncodingMode encoding) {
    if (encoding != info.encoding) {
        throw DimensionError("checkpoint was trained with " + std::string(circuit::encoding_name(info.encoding)) +
                             " encoding but " + std::string(circuit::encoding_name(encoding)) + " was requested");
    }
    const std::size_t dim = circuit::state_dim(encoding, target.size());
    if (dim != info.dims.state_dim) {
        std::string msg = "checkpoint state dim " + std::to_string(info.dims.state_dim) + " (from " +
                          std::to_string(info.source_nodes) + " components) does not match " +
                          std::to_string(dim) + " for '" + target.name() + "' (" + std::to_string(target.size()) +
                          " components)";
        if (encoding == circuit::EncodingMode::OneHotIndex) {
            msg += "; one-hot index encoding ties the state width to the component count, train with "
                   "ScalarIndex encoding (--encoding scalar) to transfer across topologies";
        }
        throw DimensionError(msg);
    }
    const std::uint8_t needed = kind_mask_of(target);
    if ((needed & ~info.kind_mask) != 0) {
        std::string missing;
        for (auto k : circuit::kAllKinds) {
            if ((needed & ~info.kind_mask) & (1u << circuit::kind_index(k))) {
                missing += (missing.empty() ? "" : ", ") + std::string(circuit::kind_token(k));
            }
        }
        throw DimensionError("checkpoint has no trained decoder for component kind(s): " + missing);
    }
}

}  // namespace sizer::agent
