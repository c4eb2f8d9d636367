#include <cstdio>

int main() {
    std::puts("wavekin: CLI wiring pending");
    return 0;
}
