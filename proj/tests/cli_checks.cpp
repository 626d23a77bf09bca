#include <cstdio>
int main() { std::puts("FAIL not implemented"); return 1; }
