#include "ctz/sequence.hpp"

#include <cstdio>
#include <memory>

namespace ctz {

std::vector<uint8_t> read_binary_file(const std::string& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!f)
        throw Error("cannot open " + path);
    std::fseek(f.get(), 0, SEEK_END);
    long n = std::ftell(f.get());
    if (n < 0)
        throw Error("cannot stat " + path);
    std::fseek(f.get(), 0, SEEK_SET);
    std::vector<uint8_t> buf(static_cast<size_t>(n));
    if (n > 0 && std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size())
        throw Error("short read on " + path);
    return buf;
}

void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!f)
        throw Error("cannot open " + path + " for writing");
    if (!bytes.empty() && std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size())
        throw Error("short write on " + path);
}

Sequence read_symbol_file(const std::string& path, uint16_t alphabet_size) {
    std::vector<uint8_t> bytes = read_binary_file(path);
    return Sequence(Alphabet(alphabet_size), std::move(bytes));
}

void write_symbol_file(const std::string& path, SymbolSpan symbols) {
    std::vector<uint8_t> bytes(symbols.begin(), symbols.end());
    write_binary_file(path, bytes);
}

} // namespace ctz
