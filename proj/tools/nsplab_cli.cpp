#include <cstdio>

int main() {
  std::puts("nsplab: placeholder");
  return 0;
}
