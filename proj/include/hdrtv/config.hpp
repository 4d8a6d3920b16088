#pragma once

namespace hdrtv {

// Stage-1 mapping network. Widths were chosen by parameter census to land
// the full network near a 100K budget; kernel is the dynamic-filter size.
struct HdcfmConfig {
    int channels = 32;
    int dyct_blocks = 2;
    int kernel = 3;
};

// Stage-2 over-exposure generator.
struct PdcgConfig {
    int channels = 32;
    int blocks = 16;
};

struct ModelConfig {
    HdcfmConfig hdcfm;
    PdcgConfig pdcg;
};

} // namespace hdrtv
