// Large n of the form m*k^2 with m squarefree and small, largest first.
#include <bits/stdc++.h>
using namespace std;

int main(int argc, char* argv[]) {
    long long seed = argc > 1 ? atoll(argv[1]) : 0;
    const long long limit = 1000000;
    vector<long long> cand;
    for (long long m : {2, 3, 5, 6, 7, 10, 11})
        for (long long k = 1; m * k * k <= limit; k++) cand.push_back(m * k * k);
    sort(cand.rbegin(), cand.rend());
    cand.erase(unique(cand.begin(), cand.end()), cand.end());
    printf("%lld\n", cand[seed % cand.size()]);
}
