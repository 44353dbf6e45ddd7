import sys

def main():
    for name in sorted(sys.argv[1:]):
        print(len(name), name)
    sys.exit(0)

if __name__ == '__main__':
    main()
