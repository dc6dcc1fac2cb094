#include <cstdio>

int main() {
    std::puts("speclab: command-line interface lands with the experiments module");
    return 0;
}
