from mingsim.cli import main

main()
