#include <cstdio>

int main() {
    std::puts("qrlab: subcommands pending");
    return 0;
}
