#include "fbmsig/util/hash.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace fbmsig {

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash_file: cannot open " + path);
    Fnv1a h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = static_cast<std::size_t>(in.gcount());
        h.update(std::span(reinterpret_cast<const unsigned char*>(buf.data()), got));
    }
    return h.hex();
}

}  // namespace fbmsig
