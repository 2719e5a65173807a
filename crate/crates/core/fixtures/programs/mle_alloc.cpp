// Grows a buffer 1 MiB at a time toward 1 GiB, touching every page.
#include <bits/stdc++.h>
using namespace std;

int main() {
    vector<char*> blocks;
    for (int i = 0; i < 1024; i++) {
        char* b = (char*)malloc(1 << 20);
        if (!b) return 0;
        memset(b, i & 0xff, 1 << 20);
        blocks.push_back(b);
    }
    long long s = 0;
    for (char* b : blocks) s += b[7];
    cout << s << "\n";
}
