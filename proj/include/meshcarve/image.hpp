#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mc {

// Row-major float image, channel-fastest storage. Carries normal maps (c=3),
// depth maps and masks (c=1), and scheduler tensors of any channel count.
struct ImageF {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    ImageF() = default;
    ImageF(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {}

    double& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
    bool same_shape(const ImageF& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// Raw map file: magic "NMAP", then height, width, channel count as 32-bit
// unsigned little-endian, then samples as little-endian float32, row-major.
void save_nmap(const ImageF& img, const std::string& path);
ImageF load_nmap(const std::string& path);

// 8-bit RGB preview encoding normals as n*0.5+0.5 per channel.
// Visualization only; quantitative paths use NMAP floats.
void save_normal_png(const ImageF& normals, const std::string& path);

}  // namespace mc
