from primindex.main import main

main()
