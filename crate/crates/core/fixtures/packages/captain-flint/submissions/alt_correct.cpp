#include <bits/stdc++.h>
using namespace std;

int main() {
    int t;
    scanf("%d", &t);
    while (t--) {
        int n;
        scanf("%d", &n);
        if (n <= 30) {
            puts("NO");
            continue;
        }
        int rest = n - 30;
        if (rest == 6 || rest == 10 || rest == 14)
            printf("YES\n%d 6 14 15\n", n - 35);
        else
            printf("YES\n%d 14 10 6\n", rest);
    }
}
