// Development-time differential gate, generation half: writes a corpus of
// random symbols as PGM files plus an expected.txt manifest. diff_check.py
// decodes them with an independent decoder and compares. Not part of the
// regular test suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qrlab/image.hpp"
#include "qrlab/qr_encoder.hpp"
#include "qrlab/rng.hpp"

using namespace qrlab;

namespace {

std::string random_payload(Rng& rng, std::size_t len) {
    static const std::string alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789 /:.-";
    std::string s(len, ' ');
    for (auto& c : s) c = alphabet[rng.uniform_index(alphabet.size())];
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "diff_corpus";
    std::filesystem::create_directories(out_dir);
    std::ofstream manifest(out_dir + "/expected.txt");

    Rng rng(0xD1FF);
    int index = 0;
    for (int trial = 0; trial < 100; ++trial) {
        for (qr::EcLevel ec : qr::kAllEcLevels) {
            const std::size_t len = 5 + rng.uniform_index(48);
            const std::string payload = random_payload(rng, len);
            const auto image = // scale 6, quiet 6: inside the sweet spot of OpenCV's quirc-based
            // detector, which is flaky at larger absolute symbol sizes
            qr::render(qr::encode_matrix({payload, ec, qr::kAutoMask}), 6, 4);
            char name[32];
            std::snprintf(name, sizeof name, "%04d.pgm", index++);
            img::write_pgm(image, out_dir + "/" + name);
            manifest << name << "\t" << payload << "\n";
        }
    }
    std::printf("wrote %d symbols to %s\n", index, out_dir.c_str());
    return 0;
}
