from gmequiv.cli import main

main()
