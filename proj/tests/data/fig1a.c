int main(argc,argv)
{
    int done = 0, n = 10000, rank, numprocs, i;
    double pi_total, pi, h, sum, x;

    MPI_Init(&argc,&argv);
    MPI_Comm_size(MPI_COMM_WORLD,&numprocs);
    MPI_Comm_rank(MPI_COMM_WORLD,&rank);

    while (!done)
    {
	   MPI_Bcast(&n, 1, MPI_INT, 0, MPI_COMM_WORLD);
	   if (n == 0)
              break;
	   h   = 1.0 / (double) n;
    }

    MPI_Finalize();
    return 0;
}
