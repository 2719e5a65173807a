// Random array; half of the seeds move the maximum to the last position.
#include <bits/stdc++.h>
using namespace std;

int main(int argc, char* argv[]) {
    unsigned seed = argc > 1 ? atoi(argv[1]) : 0;
    mt19937 rng(seed);
    int n = 2 + rng() % 7;
    vector<int> a(n);
    for (auto& x : a) x = (int)(rng() % 2001) - 1000;
    if (rng() % 2) swap(*max_element(a.begin(), a.end()), a.back());
    printf("%d\n", n);
    for (int i = 0; i < n; i++) printf("%d%c", a[i], i + 1 < n ? ' ' : '\n');
}
