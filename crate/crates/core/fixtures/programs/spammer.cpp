#include <bits/stdc++.h>

int main() {
    for (;;) std::fputs("spam spam spam spam\n", stdout);
}
