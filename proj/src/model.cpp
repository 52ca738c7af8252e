// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "invren/model.h"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace invren {

using nlohmann::json;

const char* semantic_class_name(uint32_t cls) {
    static const char* names[kSemanticClassCount] = {"road", "sidewalk", "building", "wall", "sky", "void"};
    return cls < kSemanticClassCount ? names[cls] : "unknown";
}

int semantic_class_from_name(const std::string& name) {
    for (uint32_t i = 0; i < kSemanticClassCount; ++i)
        if (name == semantic_class_name(i)) return static_cast<int>(i);
    return -1;
}

static json grid_to_json(const HashGridSpec& g) {
    return json{{"levels", g.levels},
                {"log2_table", g.log2_table},
                {"features", g.features},
                {"base_resolution", g.base_resolution},
                {"top_resolution", g.top_resolution}};
}

static HashGridSpec grid_from_json(const json& j) {
    HashGridSpec g;
    g.levels = j.value("levels", g.levels);
    g.log2_table = j.value("log2_table", g.log2_table);
    g.features = j.value("features", g.features);
    g.base_resolution = j.value("base_resolution", g.base_resolution);
    g.top_resolution = j.value("top_resolution", g.top_resolution);
    return g;
}

std::string ModelConfig::to_json() const {
    json j;
    j["bounds"] = {{"lo", {bounds.lo.x, bounds.lo.y, bounds.lo.z}}, {"hi", {bounds.hi.x, bounds.hi.y, bounds.hi.z}}};
    j["illumination_count"] = illumination_count;
    j["image_count"] = image_count;
    j["intrinsic"] = {{"grid", grid_to_json(intrinsic.grid)},
                      {"mlp_hidden", intrinsic.mlp_hidden},
                      {"mlp_layers", intrinsic.mlp_layers},
                      {"geometric_init", intrinsic.geometric_init},
                      {"geom_center", {intrinsic.geom_center.x, intrinsic.geom_center.y, intrinsic.geom_center.z}},
                      {"geom_radius", intrinsic.geom_radius},
                      {"kappa_init", intrinsic.kappa_init},
                      {"grad_step", intrinsic.grad_step}};
    j["sky"] = {{"hidden", sky.hidden}, {"layers", sky.layers}, {"octaves", sky.octaves}};
    j["radiance"] = {{"grid", grid_to_json(radiance.grid)},
                     {"hidden", radiance.hidden},
                     {"layers", radiance.layers},
                     {"dir_octaves", radiance.dir_octaves}};
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    ModelConfig c;
    if (j.contains("bounds")) {
        auto lo = j["bounds"]["lo"];
        auto hi = j["bounds"]["hi"];
        c.bounds.lo = {lo[0], lo[1], lo[2]};
        c.bounds.hi = {hi[0], hi[1], hi[2]};
    }
    c.illumination_count = j.value("illumination_count", 1u);
    c.image_count = j.value("image_count", 1u);
    if (j.contains("intrinsic")) {
        const auto& ji = j["intrinsic"];
        if (ji.contains("grid")) c.intrinsic.grid = grid_from_json(ji["grid"]);
        c.intrinsic.mlp_hidden = ji.value("mlp_hidden", c.intrinsic.mlp_hidden);
        c.intrinsic.mlp_layers = ji.value("mlp_layers", c.intrinsic.mlp_layers);
        c.intrinsic.geometric_init = ji.value("geometric_init", c.intrinsic.geometric_init);
        if (ji.contains("geom_center")) {
            auto g = ji["geom_center"];
            c.intrinsic.geom_center = {g[0], g[1], g[2]};
        }
        c.intrinsic.geom_radius = ji.value("geom_radius", c.intrinsic.geom_radius);
        c.intrinsic.kappa_init = ji.value("kappa_init", c.intrinsic.kappa_init);
        c.intrinsic.grad_step = ji.value("grad_step", c.intrinsic.grad_step);
    }
    if (j.contains("sky")) {
        c.sky.hidden = j["sky"].value("hidden", c.sky.hidden);
        c.sky.layers = j["sky"].value("layers", c.sky.layers);
        c.sky.octaves = j["sky"].value("octaves", c.sky.octaves);
    }
    if (j.contains("radiance")) {
        const auto& jr = j["radiance"];
        if (jr.contains("grid")) c.radiance.grid = grid_from_json(jr["grid"]);
        c.radiance.hidden = jr.value("hidden", c.radiance.hidden);
        c.radiance.layers = jr.value("layers", c.radiance.layers);
        c.radiance.dir_octaves = jr.value("dir_octaves", c.radiance.dir_octaves);
    }
    return c;
}

SceneModel SceneModel::create(const ModelConfig& cfg, uint64_t seed) {
    SceneModel m;
    m.cfg_ = cfg;
    m.intrinsic_ = IntrinsicField(cfg.intrinsic, cfg.bounds);
    m.intrinsic_.register_params(m.store_);
    for (uint32_t i = 0; i < cfg.illumination_count; ++i) {
        m.skies_.emplace_back(cfg.sky, i);
        m.skies_.back().register_params(m.store_);
    }
    m.radiance_ = RadianceField(cfg.radiance, cfg.bounds);
    m.radiance_.register_params(m.store_);
    m.exposures_ = ExposureSet(cfg.image_count);
    m.exposures_.register_params(m.store_);
    m.albedos_ = SemanticAlbedoSet(kSemanticClassCount);
    m.albedos_.register_params(m.store_);

    Rng rng = Rng::stream(seed, 0x6d6f64656cull);
    m.intrinsic_.init(m.store_, rng);
    for (auto& sky : m.skies_) sky.init(m.store_, rng);
    m.radiance_.init(m.store_, rng);
    m.exposures_.init(m.store_);
    m.albedos_.init(m.store_);
    return m;
}

const SkyDome& SceneModel::sky(uint32_t m) const {
    if (m >= skies_.size()) throw std::out_of_range("SceneModel: illumination index out of range");
    return skies_[m];
}

static constexpr char kCkptMagic[4] = {'I', 'R', 'C', 'K'};
static constexpr uint32_t kCkptVersion = 1;

template <class T>
static void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
static T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

void SceneModel::save(const std::string& path) const {
    static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes little-endian host");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
    os.write(kCkptMagic, 4);
    write_pod(os, kCkptVersion);
    std::string cfg = cfg_.to_json();
    write_pod(os, static_cast<uint32_t>(cfg.size()));
    os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    write_pod(os, static_cast<uint32_t>(store_.segments().size()));
    for (const auto& s : store_.segments()) {
        write_pod(os, static_cast<uint16_t>(s.name.size()));
        os.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
        write_pod(os, s.offset);
        write_pod(os, s.length);
    }
    std::vector<float> buf(store_.size());
    for (uint32_t i = 0; i < store_.size(); ++i) buf[i] = static_cast<float>(store_.value(i));
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

SceneModel SceneModel::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCkptMagic, 4) != 0)
        throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
    uint32_t version = read_pod<uint32_t>(is);
    if (version != kCkptVersion) throw std::runtime_error("checkpoint: unsupported version");
    uint32_t cfg_len = read_pod<uint32_t>(is);
    std::string cfg_text(cfg_len, '\0');
    is.read(cfg_text.data(), cfg_len);
    if (!is) throw std::runtime_error("checkpoint: truncated config");

    SceneModel m = create(ModelConfig::from_json(cfg_text), 0);

    uint32_t n_segments = read_pod<uint32_t>(is);
    if (n_segments != m.store_.segments().size()) throw std::runtime_error("checkpoint: segment table mismatch");
    for (uint32_t i = 0; i < n_segments; ++i) {
        uint16_t name_len = read_pod<uint16_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        uint32_t offset = read_pod<uint32_t>(is);
        uint32_t length = read_pod<uint32_t>(is);
        const auto& s = m.store_.segments()[i];
        if (!is || name != s.name || offset != s.offset || length != s.length)
            throw std::runtime_error("checkpoint: segment '" + name + "' does not match model layout");
    }
    std::vector<float> buf(m.store_.size());
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!is) throw std::runtime_error("checkpoint: truncated payload");
    for (uint32_t i = 0; i < m.store_.size(); ++i) m.store_.set_value(i, buf[i]);
    return m;
}

}  // namespace invren
