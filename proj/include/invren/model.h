// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "invren/fields.h"

namespace invren {

// Fixed semantic class registry shared by datasets, losses and the CLI.
enum SemanticClass : uint8_t {
    kSemRoad = 0,
    kSemSidewalk = 1,
    kSemBuilding = 2,
    kSemWall = 3,
    kSemSky = 4,
    kSemVoid = 5,
};
constexpr uint32_t kSemanticClassCount = 6;
const char* semantic_class_name(uint32_t cls);
int semantic_class_from_name(const std::string& name);  // -1 if unknown

struct ModelConfig {
    Aabb bounds{{-1, -1, -1}, {1, 1, 1}};
    uint32_t illumination_count = 1;
    uint32_t image_count = 1;
    IntrinsicFieldConfig intrinsic;
    SkyConfig sky;
    RadianceConfig radiance;

    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);
};

// All trainable state plus the parameter store that owns it.
class SceneModel {
public:
    static SceneModel create(const ModelConfig& cfg, uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    ParameterStore& store() { return store_; }
    const ParameterStore& store() const { return store_; }

    const IntrinsicField& intrinsic() const { return intrinsic_; }
    const SkyDome& sky(uint32_t m) const;
    uint32_t sky_count() const { return static_cast<uint32_t>(skies_.size()); }
    const RadianceField& radiance() const { return radiance_; }
    const ExposureSet& exposures() const { return exposures_; }
    const SemanticAlbedoSet& albedos() const { return albedos_; }

    // Versioned checkpoint: header + named segments + raw little-endian f32.
    void save(const std::string& path) const;
    static SceneModel load(const std::string& path);

private:
    SceneModel() = default;

    ModelConfig cfg_;
    ParameterStore store_;
    IntrinsicField intrinsic_;
    std::vector<SkyDome> skies_;
    RadianceField radiance_;
    ExposureSet exposures_;
    SemanticAlbedoSet albedos_;
};

}  // namespace invren
