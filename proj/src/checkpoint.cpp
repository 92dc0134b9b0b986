#include "pltr/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pltr {

namespace {

constexpr char kMagic[4] = {'P', 'L', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kTagPrototype = 0;
constexpr std::uint32_t kTagLinear = 1;

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8)
        out.push_back(static_cast<unsigned char>((v >> shift) & 0xFF));
}

void append_f64(std::vector<unsigned char>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int shift = 0; shift < 64; shift += 8)
        out.push_back(static_cast<unsigned char>((bits >> shift) & 0xFF));
}

std::uint32_t read_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

double read_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

std::uint32_t distance_tag(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::Euclidean: return 0;
        case DistanceKind::SquaredEuclidean: return 1;
        case DistanceKind::Cosine: return 2;
    }
    fail("invalid distance kind");
}

DistanceKind distance_from_tag(std::uint32_t tag) {
    switch (tag) {
        case 0: return DistanceKind::Euclidean;
        case 1: return DistanceKind::SquaredEuclidean;
        case 2: return DistanceKind::Cosine;
    }
    fail("unknown distance tag " + std::to_string(tag));
}

std::uint32_t temps_tag(TemperatureScheme::Kind kind) {
    switch (kind) {
        case TemperatureScheme::Kind::None: return 0;
        case TemperatureScheme::Kind::Channel: return 1;
        case TemperatureScheme::Kind::Class: return 2;
        case TemperatureScheme::Kind::Dense: return 3;
    }
    fail("invalid temperature kind");
}

TemperatureScheme::Kind temps_from_tag(std::uint32_t tag) {
    switch (tag) {
        case 0: return TemperatureScheme::Kind::None;
        case 1: return TemperatureScheme::Kind::Channel;
        case 2: return TemperatureScheme::Kind::Class;
        case 3: return TemperatureScheme::Kind::Dense;
    }
    fail("unknown temperature tag " + std::to_string(tag));
}

std::size_t temps_count(TemperatureScheme::Kind kind, std::size_t k, std::size_t d) {
    switch (kind) {
        case TemperatureScheme::Kind::None: return 0;
        case TemperatureScheme::Kind::Channel: return d;
        case TemperatureScheme::Kind::Class: return k;
        case TemperatureScheme::Kind::Dense: return k * d;
    }
    fail("invalid temperature kind");
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    std::vector<unsigned char> buf;
    buf.insert(buf.end(), kMagic, kMagic + 4);
    append_u32(buf, kVersion);
    if (const auto* model = std::get_if<PrototypeModel>(&ckpt)) {
        model->check();
        append_u32(buf, kTagPrototype);
        append_u32(buf, static_cast<std::uint32_t>(model->num_classes()));
        append_u32(buf, static_cast<std::uint32_t>(model->dim()));
        append_u32(buf, distance_tag(model->kind));
        append_u32(buf, temps_tag(model->temps.kind));
        for (double v : model->prototypes.flat()) append_f64(buf, v);
        for (double v : model->temps.values.flat()) append_f64(buf, v);
    } else {
        const auto& linear = std::get<LinearModel>(ckpt);
        append_u32(buf, kTagLinear);
        append_u32(buf, static_cast<std::uint32_t>(linear.num_classes()));
        append_u32(buf, static_cast<std::uint32_t>(linear.dim()));
        append_u32(buf, 0);
        append_u32(buf, 0);
        for (double v : linear.weights.flat()) append_f64(buf, v);
        for (double v : linear.bias) append_f64(buf, v);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) fail("write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open checkpoint '" + path.string() + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    constexpr std::size_t header = 4 + 6 * 4;
    if (buf.size() < header) fail("truncated checkpoint '" + path.string() + "'");
    if (std::memcmp(buf.data(), kMagic, 4) != 0) fail("bad magic in '" + path.string() + "'");
    if (read_u32(buf.data() + 4) != kVersion) fail("unsupported checkpoint version");
    const std::uint32_t model_tag = read_u32(buf.data() + 8);
    const std::uint32_t k = read_u32(buf.data() + 12);
    const std::uint32_t d = read_u32(buf.data() + 16);
    const std::uint32_t dist_tag = read_u32(buf.data() + 20);
    const std::uint32_t temp_tag = read_u32(buf.data() + 24);
    if (k == 0 || d == 0) fail("empty checkpoint '" + path.string() + "'");

    const std::size_t primary = std::size_t(k) * d;
    std::size_t secondary = 0;
    if (model_tag == kTagPrototype)
        secondary = temps_count(temps_from_tag(temp_tag), k, d);
    else if (model_tag == kTagLinear)
        secondary = k;
    else
        fail("unknown model tag " + std::to_string(model_tag));

    const std::size_t expected = header + (primary + secondary) * 8;
    if (buf.size() < expected) fail("truncated checkpoint '" + path.string() + "'");
    if (buf.size() > expected) fail("trailing bytes in '" + path.string() + "'");

    const unsigned char* p = buf.data() + header;
    if (model_tag == kTagPrototype) {
        PrototypeModel model;
        model.kind = distance_from_tag(dist_tag);
        model.prototypes = Matrix(k, d);
        for (double& v : model.prototypes.flat()) {
            v = read_f64(p);
            p += 8;
        }
        const auto scheme = temps_from_tag(temp_tag);
        switch (scheme) {
            case TemperatureScheme::Kind::None: model.temps = TemperatureScheme::none(); break;
            case TemperatureScheme::Kind::Channel: model.temps = TemperatureScheme::channel(d); break;
            case TemperatureScheme::Kind::Class: model.temps = TemperatureScheme::per_class(k); break;
            case TemperatureScheme::Kind::Dense: model.temps = TemperatureScheme::dense(k, d); break;
        }
        for (double& v : model.temps.values.flat()) {
            v = read_f64(p);
            p += 8;
        }
        model.check();
        return model;
    }
    LinearModel linear;
    linear.weights = Matrix(k, d);
    for (double& v : linear.weights.flat()) {
        v = read_f64(p);
        p += 8;
    }
    linear.bias.resize(k);
    for (double& v : linear.bias) {
        v = read_f64(p);
        p += 8;
    }
    if (!all_finite(linear.weights.flat()) || !all_finite(linear.bias))
        fail("non-finite parameter in '" + path.string() + "'");
    return linear;
}

}  // namespace pltr
