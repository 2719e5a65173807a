#include <bits/stdc++.h>
using namespace std;

int main() {
    int n;
    scanf("%d", &n);
    long long best = LLONG_MIN;
    while (n--) {
        long long x;
        scanf("%lld", &x);
        if (x > best) best = x;
    }
    printf("%lld\n", best);
}
